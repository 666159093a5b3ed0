"""Key symbols per channel symbol, read off the transcript.

Run: python demos/05_efficiency.py
"""

from vmqkd import channel as ch
from vmqkd.engine import ProtocolConfig, efficiency, run_chain
from vmqkd.rng import make_rng

for t in (1, 2, 3, 4):
    eng = run_chain(ProtocolConfig(p=13, t=t), make_rng(t))
    print(f"t={t}: eta = {efficiency(eng.transcript)}")

# %% Noise forces retransmission of the missing indices, which costs qudits
# and a padding list whenever the residual does not fill the grid.
for noise in (0.0, 0.03, 0.06, 0.1):
    eng = run_chain(ProtocolConfig(p=11, t=2, channel=ch.ChannelConfig(noise=noise)), make_rng(7))
    rounds = [e["payload"]["rounds"] for e in eng.transcript.of_type("hop_complete")]
    print(f"noise {noise:.2f}: rounds per hop {rounds}, eta = {float(efficiency(eng.transcript)):.4f}")

# %% The last transcript line carries the running counters.
print(eng.transcript.dumps().splitlines()[-1])
