"""A live session end to end: turns arrive, terms and snippets come back.

Each appended exchange re-windows the conversation, picks the best model
from the grid, extracts ranked terms, and returns tone-filtered snippets.
"""

from relsnip import Engine
from relsnip.tone import ToneProfile


class ScriptedTones:
    """Stands in for the hosted tone service."""

    def __init__(self):
        self.script = [
            {"analytical": 0.3, "confident": 0.2},
            {"tentative": 0.84},                       # uncertainty: 3 snippets
            {"confident": 0.9, "analytical": 0.82},    # certainty: 1 snippet
        ]

    def analyze(self, text):
        return ToneProfile(self.script.pop(0), source="external")


corpus = (
    "Tickets are routed to the correct queue. Agents resolve tickets from queues. "
    "Every ticket carries a priority and a status. Queues group tickets by topic. "
    "Reports summarize ticket volume. Escalations move tickets between queues. "
    "Ticket queues support custom filters. Agents assign tickets quickly."
)

engine = Engine(warm_wfsts=False, tone_client=ScriptedTones())
repo_id = engine.ingest_repository(documents=[("handbook", corpus)])
session = engine.create_session(repo_id)

turns = [
    ("analyst", "How are tickets routed to queues?"),
    ("stakeholder", "I think maybe escalations could move tickets somewhere?"),
    ("stakeholder", "Priorities definitely order the ticket queue."),
]

for speaker, text in turns:
    result = engine.append_exchange(session, speaker, text)
    print(f"\n{speaker}: {text}")
    print(f"  model: {result.method}-{result.order}   "
          f"tones: { {k: v for k, v in result.tones.scores.items() if v} }")
    print(f"  terms: {[t.surface for t in result.terms]}")
    print(f"  snippets ({len(result.snippets)}):")
    for s in result.snippets:
        print(f"    [{s.key}] score={s.score:.4f}  {s.text[:70]}...")

print("\nCSV export:")
from relsnip import export_session
print(export_session(session, "csv"))
