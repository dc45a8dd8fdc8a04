"""How pair collection grows with crystal length at fixed focusing.

Run: python demos/05_length_scaling.py
"""
from spdcmodes import ktp_source
from spdcmodes.sweep import length_scaling

# %% Holding xi fixed means the waists grow with sqrt(L).  Per unit
# bandwidth the type-II rate is length independent, type-0 goes as sqrt(L),
# and behind a fixed narrow filter both grow linearly.
for matching, L0, phi in (("type2", 0.04, 0.0), ("type0", 0.005, 0.875)):
    base = ktp_source(matching, L0, xi=(2.84,) * 3, phi_tilde=phi)
    lengths = [L0 * k for k in (0.25, 0.5, 1.0, 2.0)]
    for filtered in (False, True):
        r = length_scaling(base, lengths, filtered=filtered)
        tag = "narrow filter" if filtered else "unfiltered"
        print(f"{matching} {tag:13s}: S2 ~ L^{r.exponent:.3f} (+-{r.stderr:.1e})")
