import numpy as np
def random_params(rng, count, family="dsiw", zeta_range=(0.3, 4.0)):
    """Parameter vectors spread over the interior of the space."""
    from bdsiw import BivMaxParams

    out = []
    for _ in range(count):
        t = rng.uniform(0.02, 0.98, size=3)
        z = float(np.exp(rng.uniform(np.log(zeta_range[0]), np.log(zeta_range[1]))))
        out.append(BivMaxParams(*t, z, family))
    return out
