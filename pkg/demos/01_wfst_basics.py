"""Weighted transducers: chains, composition, and n-best paths.

Costs live in the tropical semiring: along a path they add, across
alternatives the minimum wins, and a lower cost means a more likely string.
"""

from relsnip import SymbolTable, Wfst, compose, linear_chain, n_shortest_paths, path_weight

symbols = SymbolTable()

print("A sentence becomes a zero-cost chain acceptor:")
chain = linear_chain(["disput", "system", "support", "concurr", "user"], symbols)
print(chain.dump())

print("\nA tiny cost model over the same vocabulary:")
model = Wfst(symbols)
q = model.add_state()
model.set_start(q)
for token, cost in [("disput", 0.9), ("system", 0.4), ("support", 0.7),
                    ("concurr", 0.2), ("user", 0.3), ("page", 1.6)]:
    label = symbols.add(token)
    model.add_arc(q, label, label, cost, q)
model.set_final(q, 0.0)
print(model.dump())

print("\nComposing the chain with the model scores the sentence:")
composed = compose(chain, model)
print("total cost:", path_weight(model, ["disput", "system", "support", "concurr", "user"]))

print("\nThe three cheapest paths of the composition:")
for path in n_shortest_paths(composed, 3):
    print(" ", path.otokens(symbols), "cost", round(path.total_weight, 3))
