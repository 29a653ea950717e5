"""
Exploring the bounded state space
=================================

Enumerate every ACCOUNT state reachable in three steps, group the states by
behavioral equivalence, and check that transitions respect the grouping.
"""

from collections import Counter
from pathlib import Path

from otscontract import parse_spec
from otscontract.interpreter import DomainBounds, Interpreter

CORPUS = Path(__file__).resolve().parents[1] / "corpus"
ms = parse_spec([CORPUS / "account.cafe"])
machine = Interpreter(ms, "ACCOUNT", DomainBounds(int_range=(-3, 3)), implicit_stutter=True)

states = machine.reachable_states(3)
print(len(states), "histories of length <= 3")

# %%
# Two histories are equivalent when every observer agrees on them.  ACCOUNT
# has a single observer, so the classes are indexed by the balance.
classes = Counter(machine.observe(s, "read") for s in states)
for balance, size in sorted(classes.items()):
    print(f"balance {balance:2}: {size:3} histories")

# %%
# Stuttering: every ineffective step leads back to an equivalent state.
moves = machine.transition_instances()
ineffective = [(s, name, args) for s in states for name, args in moves
               if not machine.check_effective(s, name, args)]
broken = [x for x in ineffective
          if not machine.behaviorally_equal(machine.apply_transition(x[0], x[1], x[2]), x[0])]
print(len(ineffective), "ineffective steps,", len(broken), "that change the state")

# %%
# Congruence: equivalent states stay equivalent after the same step.
a = machine.initial_state().then("add", [2]).then("add", [1])
b = machine.initial_state().then("add", [3]).then("add", [-4])  # the second step stutters
print("a ~ b:", bool(machine.behaviorally_equal(a, b)))
for x in (-3, 0, 2):
    same = machine.behaviorally_equal(a.then("add", [x]), b.then("add", [x]))
    print(f"  after add({x}): {bool(same)}")
