"""The 4 x 5 model grid and perplexity-driven selection.

Twenty smoothed language models are built from one counting pass; for any
conversation window, the one with the lowest perplexity wins and its order
tells how much context the repository supports for that window.
"""

from relsnip import build_grid, grid_perplexities, select_model
from relsnip.ngram import METHODS, ORDERS
from relsnip.textproc import Document, load_stoplist, normalize, tokenize

stoplist = load_stoplist()

corpus = (
    "Tickets are routed to the correct queue. Agents resolve tickets from queues. "
    "Every ticket carries a priority and a status. Queues group tickets by topic. "
    "Reports summarize ticket volume. Escalations move tickets between queues. "
    "Ticket queues support custom filters. Agents assign tickets quickly."
)
docs = [Document.from_text("handbook", corpus, stoplist)]
grid = build_grid(docs)

window = normalize(tokenize("How are tickets routed between queues?"), stoplist)
print("window:", window)

ppl = grid_perplexities(grid, window)
header = "              " + "".join(f"   n={n:<7}" for n in ORDERS)
print(header)
for method in METHODS:
    row = "".join(f"{ppl[(method, n)]:>10.3f} " for n in ORDERS)
    print(f"{method:13s} {row}")

method, order = select_model(grid, window)
print(f"\nselected: {method} order {order} "
      f"(perplexity {ppl[(method, order)]:.3f})")
