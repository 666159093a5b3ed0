"""What an intercept-resend attacker does to a round, and what she learns.

Run: python demos/04_eavesdropper.py
"""

from fractions import Fraction

from vmqkd import channel as ch
from vmqkd.engine import Engine, ProtocolConfig
from vmqkd.rng import make_rng

p = 11
dist = ch.intercept_resend_outcome_distribution(p)
print("receiver outcome law under full interception:", [str(Fraction(x).limit_denominator(200)) for x in dist[:3]], "...")
print("chance a triple comes out unanimous:", round(ch.all_equal_probability(dist), 5))

# %% One round at a time; the receiver's thresholds reject nearly every one.
cfg = ProtocolConfig(p=p, t=1, channel=ch.ChannelConfig(adversary=ch.InterceptResend(1.0)))
aborts, hits, total = 0, 0, 0
for trial in range(300):
    eng = Engine(cfg, make_rng(trial)).setup()
    out = eng.distribution_round(eng.dealer, eng.holders[0], range(1, cfg.key_length + 1))
    aborts += not out.kept
    for record, grid, offset in eng.eve_log:
        hits += round(ch.eve_key_recovery_rate(record, grid, offset) * 33)
        total += 33
print(f"aborted rounds: {aborts}/300")
print(f"key elements Eve guessed right: {hits}/{total} = {hits / total:.4f} (3/p^2 = {3 / p**2:.4f})")

# %% Partial interception lowers the abort rate; the thresholds trade off
# sensitivity against tolerance of honest noise.
for f in (0.1, 0.3, 0.6):
    cfg = ProtocolConfig(p=p, t=1, channel=ch.ChannelConfig(adversary=ch.InterceptResend(f)))
    kept = 0
    for trial in range(200):
        eng = Engine(cfg, make_rng(trial, 1)).setup()
        kept += eng.distribution_round(eng.dealer, eng.holders[0], range(1, 34)).kept
    print(f"fraction {f}: {kept}/200 rounds kept")
