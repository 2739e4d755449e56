"""
The whole experiment in one call
================================

Runs preprocessing, all twelve models, cross-validation, significance tests,
Shapley summaries and plots on the toy corpus. The same run is available as
``spamlab run --corpus-root DIR -o OUT``; set ENRON_CORPUS_DIR to use the
real corpus instead.
"""
import os
import tempfile

from spamlab import toy_corpus_path
from spamlab.cli import main
from spamlab.pipeline import RunConfig, run_pipeline

root = os.environ.get("ENRON_CORPUS_DIR", str(toy_corpus_path()))
out = tempfile.mkdtemp(prefix="spamlab_")
bundle = run_pipeline(RunConfig(corpus_root=root, output_dir=out, seed=0))
print("status", "ok" if bundle.ok else bundle.failed_stage, "in", round(bundle.metadata["wall_clock_seconds"], 1), "s")
for name, rep in sorted(bundle.reports.items(), key=lambda kv: -kv[1].mean("fscore")):
    print(f"  {name:20s} F {rep.mean('fscore'):.3f}  AUC {rep.mean('auc'):.3f}")
print("artefacts:", sorted(bundle.manifest)[:6], "...")

# the command line drives the same code; redraw the plots from the CSVs
main(["plot", out])
