import numpy as np, time
from calibkit import *
from calibkit.behavior_data import fit_normalizer
from calibkit.plant_sim import DronePlant, drone_full_config, generate_dataset, run_closed_loop, excitation_warmup_inputs
from calibkit import calib as cal

t0 = time.time()
plant = DronePlant()
train_ds = generate_dataset(plant, drone_full_config(count=5000, length=61, seed=10, split="train", calm_fraction=0.25))
test_ds = generate_dataset(plant, drone_full_config(count=500, length=61, seed=11, split="test", calm_fraction=0.25))
norm = fit_normalizer(train_ds, train_ds.setpoint)
model = cal.CalibModel.create(train_ds.layout, L=4, n_b=4, normalizer=norm,
                              hidden=(128, 128), phi_hidden=(128, 128), a=0.5, b=2.0, seed=0)
cfg = cal.TrainConfig(epochs=40, seed=0, lr=1e-3, lr_decay=0.93)
init_m = cal.eval_model(model, test_ds, beta=0.05)
print("INIT:", {k: round(v,5) for k,v in init_m.items()}, flush=True)

lo = np.array([0.0, -0.5, -5.0]); hi = np.array([5.0, 0.5, 5.0])
def loop_check(model, tag):
    def ctrl(w): return np.clip(cal.control_action(model, w), lo, hi)
    for start, stag in ([[8.0,-6.0,5.0,0.0],"crit7"], [[4.0,3.0,-2.0,1.0],"alt"]):
        log = run_closed_loop(plant, ctrl, start, L=4, steps=900, controller_tag="calib")
        dinf = np.abs(log.w[:, :3]).max(axis=1)
        k1 = int(np.argmax(dinf <= 1.0)) if np.any(dinf <= 1.0) else -1
        fw = log.w[log.warmup-4:log.warmup+1].ravel()
        pred = cal.rollout_predicted(model, fw, 100)
        rmse = float(np.sqrt(np.mean((pred[:,:3] - log.w[log.warmup:log.warmup+101,:3])**2)))
        print(f"  [{tag}/{stag}] reach1@{k1} dinf600={dinf[600]:.2f} tail={dinf[600:].max():.2f} predRMSE={rmse:.2f}", flush=True)

def log_fn(r):
    print({k: round(v,5) for k,v in r.items() if k in ("epoch","train_loss","test_total","test_reconstruction_mse","test_subset_mse","test_hinge_violation_rate")}, flush=True)
    ep = r["epoch"]
    if ep in (9, 19, 29, 39):
        cal.save_checkpoint(model, f".scratch/v2_ep{ep}.ckpt.json")
        loop_check(model, f"ep{ep}")

hist = cal.train(model, train_ds, cfg, test_ds=test_ds, log_fn=log_fn)
cal.save_checkpoint(model, ".scratch/v2.ckpt.json", seed=0, train_config=cfg)
m = cal.eval_model(model, test_ds, beta=0.05)
print("FINAL:", {k: round(v,6) for k,v in m.items()}, flush=True)
print("init recon:", init_m["reconstruction_mse"], "-> 10% bar:", 0.1*init_m["reconstruction_mse"], flush=True)
loop_check(model, "final")
print(f"total {time.time()-t0:.0f}s", flush=True)
