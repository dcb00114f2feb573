import numpy as np, time, json
from calibkit import *
from calibkit.behavior_data import fit_normalizer
from calibkit.plant_sim import DronePlant, drone_full_config, generate_dataset, run_closed_loop
from calibkit import calib as cal

t0 = time.time()
plant = DronePlant()
train_ds = generate_dataset(plant, drone_full_config(count=5000, length=61, seed=10, split="train"))
test_ds = generate_dataset(plant, drone_full_config(count=500, length=61, seed=11, split="test"))
print(f"datasets {time.time()-t0:.0f}s", flush=True)

norm = fit_normalizer(train_ds, train_ds.setpoint)
print("scales:", norm.scale.round(3), flush=True)
model = cal.CalibModel.create(train_ds.layout, L=4, n_b=4, normalizer=norm,
                              hidden=(128, 128), phi_hidden=(128, 128), seed=0)
cfg = cal.TrainConfig(epochs=8, seed=0)
print(f"g_dim={model.g_dim} params={model.params().size}", flush=True)

hist = cal.train(model, train_ds, cfg, test_ds=test_ds,
                 log_fn=lambda r: print({k: round(v, 6) for k, v in r.items() if k in
                    ("epoch","train_loss","test_total","test_reconstruction_mse","test_hinge_violation_rate","test_anchor_chi_inf","test_anchor_eta_inf","test_subset_mse","test_weaving_mse")}, flush=True))
cal.save_checkpoint(model, ".scratch/probe.ckpt.json", seed=0, train_config=cfg)

m = cal.eval_model(model, test_ds, beta=0.05)
print("eval:", {k: round(v, 6) for k, v in m.items()}, flush=True)

ctrl = lambda w: cal.control_action(model, w)
for start in ([8.0, -6.0, 5.0, 0.0], [4.0, 3.0, -2.0, 1.0]):
    log = run_closed_loop(plant, ctrl, start, L=4, steps=900, controller_tag="calib")
    pos = log.w[:, :3]
    dinf = np.abs(pos).max(axis=1)
    k_reach = np.argmax(dinf <= 1.0) if np.any(dinf <= 1.0) else -1
    print(f"start {start}: reach<=1.0 at k={k_reach}, dinf600={dinf[600]:.2f}, tail max={dinf[600:].max():.2f}, final={dinf[-1]:.2f}", flush=True)
    # prediction comparison
    first_window = log.w[log.warmup - 4 : log.warmup + 1].ravel()
    pred = cal.rollout_predicted(model, first_window, 100)
    actual = log.w[log.warmup : log.warmup + 101, :3]
    rmse = np.sqrt(np.mean((pred[:, :3] - actual) ** 2))
    print(f"   prediction RMSE over 10s: {rmse:.3f}", flush=True)
print(f"total {time.time()-t0:.0f}s", flush=True)
