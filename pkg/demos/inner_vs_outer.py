"""Rate-split inner bound against the marginal outer bound on a noisy channel."""
import numpy as np

from cifc.channel import channel_from_kernel
from cifc.search import search_frontier

rng = np.random.default_rng(7)
ch = channel_from_kernel(rng.dirichlet(np.full(4, 0.4), size=(2, 2)).reshape(2, 2, 2, 2))
inner = search_frontier(ch, "RTD_INNER", weights=5, budget=100, seed=0)
outer = search_frontier(ch, "MARGINAL_OUTER", weights=5, budget=100, seed=0)
print("lambda  inner   outer")
for i, o in zip(inner, outer):
    print(f"{i.lam:.2f}    {i.value:.4f}  {o.value:.4f}")
