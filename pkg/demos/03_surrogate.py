"""Generate a small dataset, fit a compact surrogate and compare it with the cycle model.

The full-size network and dataset are run by the acceptance suite. This demo
uses 800 samples and a [7, 64, 64, 2] network so it finishes in seconds.

    python3 demos/03_surrogate.py
"""

import numpy as np

from regen_turboshaft import REFERENCE_POINT, evaluate_cycle
from regen_turboshaft.dataset import fit_norm, generate_sweep, input_to_row
from regen_turboshaft.surrogate import TrainConfig, predict
from regen_turboshaft.workflow import evaluate_surrogate, fit_surrogate

data = generate_sweep(n_target=800, seed=1)
print(f"sampled {len(data)} points, {int(data.feasible.sum())} feasible")

norm = fit_norm(data.modeling().table)
fit = fit_surrogate(data, norm, (7, 64, 64, 2), TrainConfig(epochs=200, seed=1), train_fraction=0.2, split_seed=1)
hist = fit.history
print(f"trained {len(hist.train_loss)} epochs, best validation loss {min(hist.val_loss):.2e} at epoch {hist.best_epoch}")
print()
print(evaluate_surrogate(fit.model, norm, data, 0.2, 1).to_table())

truth = evaluate_cycle(REFERENCE_POINT)
guess = predict(fit.model, norm, np.array([input_to_row(REFERENCE_POINT)]))[0]
print("reference point      cycle model    surrogate")
print(f"  thermal efficiency {truth.eta_th:12.5f} {guess[0]:12.5f}")
print(f"  NOx [g/s]          {truth.mdot_NOx * 1e3:12.5f} {guess[1] * 1e3:12.5f}")
