"""Bivariate threshold sharing with a dealer who can name a cheater.

Run: python demos/02_threshold_sharing.py
"""

from vmqkd.errors import VerificationFailed
from vmqkd.rng import make_rng
from vmqkd.sharing import (
    DealerVerifier,
    LagrangeComponent,
    deal,
    decrypt_component,
    derive_session_keys,
    encrypt_component,
    lagrange_component,
    reconstruct,
    secret_candidates,
)

rng = make_rng(42)
setup, shares = deal(6, t=3, n=4, rng=rng, p=11)
print("dealer", setup.dealer, "holders", setup.identities[1:], "h =", setup.h)

# %% Two holders agree on a pair of session keys without talking.
a, b = derive_session_keys(shares[1], 2), derive_session_keys(shares[2], 1)
print("holder 1 sees", (a.k_ij.value, a.k_ji.value), " holder 2 sees", (b.k_ji.value, b.k_ij.value))

# %% Three holders pool padded Lagrange components; the dealer checks digests.
active = [1, 2, 3]
verifier = DealerVerifier(setup, active)
comps = {x: lagrange_component(shares[x], active) for x in active}


def collect(me, tamper=0):
    got = [comps[me]]
    for other in active:
        if other != me:
            c = comps[other]
            if other == 3 and tamper:
                c = LagrangeComponent(3, c.delta + tamper)
            got.append(decrypt_component(shares[me], other, encrypt_component(shares[other], c, me)))
    return got


print("holder 1 reconstructs", reconstruct(collect(1), verifier, shares[1]).value)
try:
    reconstruct(collect(1, tamper=4), verifier, shares[1])
except VerificationFailed as exc:
    print("forgery caught, owner =", exc.owner)

# %% With tiny parameters we can enumerate every polynomial a single holder
# could be looking at. No secret value is ruled out.
small, sh = deal(2, t=2, h=3, n=2, rng=rng, p=5)
view = lagrange_component(sh[1], [1, 2])
print("secrets consistent with holder 1's view:", secret_candidates(sh[1], view, [1, 2], 3))
