# The feedback loop as a static chain of mirrors and beam splitter.
#
# With a round-trip loss gamma = kappa * tau and a lossless fixed mirror,
# the chain's intracavity amplitude approaches the steady-state formula used
# everywhere else, with an error that shrinks linearly in gamma.
import math

from nmslab import paper_parameters
from nmslab.feedback import FeedbackChain, chain_output, chain_solve, feedback_check

p = paper_parameters(bs_reflectivity=0.3)
print(" loss      |a| chain     |a| formula   rel. deviation")
prev = None
for loss in (1e-2, 1e-3, 1e-4, 1e-5):
    chk = feedback_check(p, loss)
    order = "" if prev is None else f"  order {math.log10(prev / chk.relative_deviation):.3f}"
    print(f"{loss:7.0e}  {abs(chk.chain_amplitude):12.6g}  {abs(chk.steady_amplitude):12.6g}  "
          f"{chk.relative_deviation:.3e}{order}")
    prev = chk.relative_deviation

# the passive network only redistributes phase: unit input, unit output
fc = FeedbackChain.from_loss(0.3, p.cavity_decay, 1e-3)
print("|output| for unit input:", abs(chain_output(fc, chain_solve(fc, 1.0), 1.0)))
