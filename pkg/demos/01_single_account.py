"""
A single bank account, from equations to contracts
==================================================

Load the ACCOUNT module, run it, and print the Java class it translates to.
"""

from pathlib import Path

from otscontract import parse_spec
from otscontract.analyzer import classify, dump_model
from otscontract.codegen import emit_java_jml, translate_all
from otscontract.config import load_config
from otscontract.interpreter import Interpreter, trace_to_text

CORPUS = Path(__file__).resolve().parents[1] / "corpus"

# %%
# Parsing checks sorts and operator overloads; classification sorts the
# behavioral operators into observers and transitions.
ms = parse_spec([CORPUS / "account.cafe"])
model = classify(ms, "ACCOUNT")
print(dump_model(model))

# %%
# The module only says what ``read`` does after an *effective* ``add``.  With
# implicit stuttering switched on, an ineffective add leaves every observer
# unchanged, so the overdraft in step 2 is simply ignored.
machine = Interpreter(ms, model, implicit_stutter=True)
trace = machine.run_scenario([("add", [5]), ("add", [-10]), ("add", [3])])
print(trace_to_text(trace))

init = machine.initial_state()
print("c-add(init, -1) =", machine.check_effective(init, "add", [-1]))
print("init ~ add(init, -1):", bool(machine.behaviorally_equal(init, init.then("add", [-1]))))
different = machine.behaviorally_equal(init, init.then("add", [5]))
print("init ~ add(init, 5):", bool(different), "witness:", different.witness)

# %%
# The corpus configuration renames ``read`` to ``balance``.
options = load_config(CORPUS / "corpus.toml").translation_options()
(account,) = translate_all(ms, options)
print(emit_java_jml(account))
