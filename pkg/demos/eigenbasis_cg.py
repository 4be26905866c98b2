"""Dominant eigenspace by conjugate gradients in Cayley coordinates."""

import numpy as np

from alcp import AlcpConfig, generate, random_stiefel, run

inst = generate("eig", 300, 10, seed=4)
top = np.sum(np.linalg.eigvalsh(inst.data["a"])[-10:])
print("sum of the 10 largest eigenvalues (dense solver):", top)

u0 = random_stiefel(300, 10, seed=5)
for engine in ("gd", "cg-fr", "cg-hs+", "cg-hz"):
    res = run(inst.objective(), u0, AlcpConfig(engine=engine))
    rec = res.record
    print(f"{engine:7s} itr={rec.itr:4d} nfe={rec.nfe:5d} centers={rec.change} "
          f"relative gap={abs(-rec.fval - top) / top:.1e} time={rec.time:.3f}s")
