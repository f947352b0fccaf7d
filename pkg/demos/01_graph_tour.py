"""
Feedback graph tour
===================

Playing an arm reveals the losses of its out-neighbours.  This script walks
the built-in graph families and prints what the library derives from each:
the observability class, the independence number and, for weakly observable
graphs, a weakly dominating set with the split of arms it induces.

Run with ``python3 demos/01_graph_tour.py``.
"""

# %%
# The catalogue
# -------------
#
# Graphs are written ``family:K``; arms are numbered from 1.

from bobw_graphs import graph as G

for spec in ("bandit:5", "full_feedback:5", "total_order:5", "loopless_clique:5", "revealing_action:5"):
    g = G.parse_graph_spec(spec)
    a = G.analyze_graph(g)
    line = f"{spec:20s} {a.observability.tag.value:20s} alpha={a.alpha_exact}"
    if a.dominating_set:
        line += f"  D={sorted(a.dominating_set)} V1={sorted(a.v1)} V2={sorted(a.v2)}"
    print(line)

# %%
# A hand-built graph
# ------------------
#
# Arm 1 reveals the loopless arms 2 and 3 and itself; arms 4 and 5 only see
# themselves.  Only arms 2 and 3 need domination, so D = {1} and the bandit
# arms 4 and 5 land in V2.

mixed = G.FeedbackGraph(5, [(1, 1), (1, 2), (1, 3), (4, 4), (5, 5)])
a = G.analyze_graph(mixed)
print("\nmixed graph:", a.observability.tag.value)
print("  D =", sorted(a.dominating_set), " V1 =", sorted(a.v1), " V2 =", sorted(a.v2))
print("  alpha(G[V2]) =", a.alpha2)

# %%
# Two notions of domination
# -------------------------
#
# One definition asks D to cover every loopless arm, the other only the
# weakly observable ones.  They agree on most graphs but can differ by one.
# Here arm 1 is loopless yet seen by both other arms.

g = G.FeedbackGraph(3, [(2, 1), (3, 1), (1, 2), (3, 3)])
for definition in G.DominationDefinition:
    d = G.weakly_dominating_set_exact(g, definition)
    print(f"{definition.value:18s} targets={sorted(G.domination_targets(g, definition))} D={sorted(d)}")

# %%
# Unobservable graphs
# -------------------
#
# If some arm is never revealed by anyone no policy can learn its loss.

bad = G.FeedbackGraph(3, [(1, 2), (2, 1)])
obs = G.classify_observability(bad)
print("\n{1<->2, 3 isolated}:", obs.tag.value, "never observed:", sorted(obs.unobserved_vertices))
