"""Decide a few embeddings and show which rule and margins produced each verdict."""

from embedkit.criteria import EmbeddingQuery, SpaceSpec, closed_form_for, decide_embedding
from embedkit.weights import Constant, RadialPower


def show(label, query):
    v = decide_embedding(query)
    print(f"{label:<44} {v.outcome.value:<13} via {v.rule}")
    cf = closed_form_for(query)
    if cf is not None:
        print(f"{'':<44} margins {dict((k, round(m, 3)) for k, m in cf.margins.items())}")


u = Constant(1)
show("F^1_2 -> F^0_2, unweighted", EmbeddingQuery(SpaceSpec("F", 1, 2, 2, u), SpaceSpec("F", 0, 2, 2, u)))
show("F^1_2 -> F^0.9_10 (too little smoothness)", EmbeddingQuery(SpaceSpec("F", 1, 2, 2, u), SpaceSpec("F", 0.9, 10, 2, u)))

# Growing the source weight at the origin costs local smoothness but buys decay at infinity.
w = RadialPower(1, 1.0, 0.5)
show("F^1_2(|x|^(1|0.5)) -> F^0.25_2", EmbeddingQuery(SpaceSpec("F", 1, 2, 2, w), SpaceSpec("F", 0.25, 2, 2, u)))
show("F^1_2(|x|^(1|0.5)) -> F^0.75_2", EmbeddingQuery(SpaceSpec("F", 1, 2, 2, w), SpaceSpec("F", 0.75, 2, 2, u)))

# Besov: equal smoothness and integrability leaves only the microscopic index to decide.
for q0, q1 in [(1, 2), (2, 1)]:
    show(f"B^1_(2,{q0}) -> B^1_(2,{q1})",
         EmbeddingQuery(SpaceSpec("B", 1, 2, q0, u), SpaceSpec("B", 1, 2, q1, u)))
