"""
A bank of accounts as a composite object
========================================

ACCOUNT-SYSTEM keeps one ACCOUNT per user id, reached through the
``account`` projection.
"""

from pathlib import Path

from otscontract import parse_spec
from otscontract.analyzer import check_composition, classify, method_groups
from otscontract.codegen import emit_java_jml, translate_all
from otscontract.config import load_config
from otscontract.interpreter import DomainBounds, Interpreter, InterpreterError, trace_to_text

CORPUS = Path(__file__).resolve().parents[1] / "corpus"
ms = parse_spec([CORPUS / "account.cafe", CORPUS / "account_sys.cafe"])
bank = classify(ms, "ACCOUNT-SYSTEM")

# %%
# Each transition's projection equations are sorted into shapes: create,
# update, delete, or identity for the other users.
for effect in bank.effects:
    side = "other ids" if effect.negated else "its own id"
    print(f"{effect.transition:9} on {side:10} -> {effect.kind}")

print("composition diagnostics:", check_composition(bank, None, ms))
for group in method_groups(bank):
    print("method group", group.components, group.transitions)

# %%
# Simulation keeps absent accounts visible as ``absent``.  Narrowing the id
# range keeps the printout short.
machine = Interpreter(ms, bank, DomainBounds(id_range=(0, 1)), implicit_stutter=True)
trace = machine.run_scenario([("add", ["u1", 10]), ("deposit", ["u1", 5]),
                              ("withdraw", ["u1", 3])])
print(trace_to_text(trace))

# %%
# Depositing into an account that was never opened is rejected before any
# rewriting happens.
try:
    machine.run_scenario([("deposit", ["u0", 5])])
except InterpreterError as exc:
    print(exc.code, "-", exc)

# %%
# The generated class uses the method names from the corpus configuration.
options = load_config(CORPUS / "corpus.toml").translation_options()
print(emit_java_jml(translate_all(ms, options, ["ACCOUNT-SYSTEM"])[0]))
