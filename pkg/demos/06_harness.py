"""
Running a configured experiment
===============================

The same runs are available from the shell as ``assocemp run CONFIG``.
"""

# %%
# The fdd checks are level-0.01 tests, so about one seed in a hundred fails them.
import tempfile

from assocemp.harness import emit_report, exit_code, parse_config, render, run_experiment

config = parse_config("""
[model]
kind = ar1
phi = 0.5
[run]
seed = 2
n = 2048
replicates = 300
[grid]
kind = custom
points = 0.25, 0.5, 0.75
[checks]
names = limit_fdd, limit_covariance_match, indicator_covariance, si_concavity, association
""")
report = run_experiment(config)
print(render(report, "text"))
print("exit code:", exit_code(report), " config hash:", report.config_hash)

# %%
with tempfile.TemporaryDirectory() as out:
    path = emit_report(report, out, "csv")
    print(open(path).read()[:400])
