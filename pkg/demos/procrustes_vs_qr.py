"""Unbalanced Procrustes: Cayley-coordinate CG against QR-retraction descent.

Also writes the per-iteration history of each run as CSV, ready for a plot
of f against time.
"""

from pathlib import Path

from alcp import AlcpConfig, generate, random_stiefel, run, run_rgd
from alcp.records import write_trace

inst = generate("proc", 300, 10, seed=3)
obj = inst.objective()
u0 = random_stiefel(300, 10, seed=203)
f0 = obj.value(u0.data)

cayley = run(obj, u0, AlcpConfig(engine="cg-hs+", rel_grad_tol=1e-7, max_iter=20000))
qr = run_rgd(obj, u0, AlcpConfig(rel_grad_tol=1e-7, max_iter=20000))

out = Path("procrustes_history")
out.mkdir(exist_ok=True)
for name, res in (("cayley_cg-hs+", cayley), ("qr_gd", qr)):
    rec = res.record
    print(f"{name:14s} {res.reason.value:9s} itr={rec.itr:5d} f/f0={rec.fval / f0:.1e} time={rec.time:.2f}s")
    with open(out / f"{name}.csv", "w", newline="") as fh:
        write_trace(rec, fh)
print("histories written to", out.resolve())
