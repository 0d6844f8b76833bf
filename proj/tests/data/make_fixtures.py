"""Regenerates the model fixtures. The golden output comes from torch.nn.LSTM."""
import json

import numpy as np
import torch

torch.manual_seed(7)
H = 4
lstm = torch.nn.LSTM(1, H, batch_first=True).double()
lin = torch.nn.Linear(H, 1).double()
with torch.no_grad():
    for p in list(lstm.parameters()) + list(lin.parameters()):
        p.mul_(1.5)
x = torch.tensor(np.sin(2 * np.pi * np.arange(64) / 16) * 0.8 + 0.1, dtype=torch.float64).reshape(1, 64, 1)
with torch.no_grad():
    h, _ = lstm(x)
    y = (lin(h) + x).reshape(-1).numpy()

sd = {
    "rec.weight_ih_l0": lstm.weight_ih_l0.tolist(),
    "rec.weight_hh_l0": lstm.weight_hh_l0.tolist(),
    "rec.bias_ih_l0": lstm.bias_ih_l0.tolist(),
    "rec.bias_hh_l0": lstm.bias_hh_l0.tolist(),
    "lin.weight": lin.weight.tolist(),
    "lin.bias": lin.bias.tolist(),
}
model = {
    "model_data": {"model": "SimpleRNN", "input_size": 1, "skip": 1, "output_size": 1, "unit_type": "LSTM",
                   "num_layers": 1, "hidden_size": H, "bias_fl": True},
    "state_dict": sd,
}
json.dump(model, open("golden_lstm_h4.json", "w"), indent=1)
json.dump({"input": x.reshape(-1).tolist(), "output": y.tolist()}, open("golden_lstm_h4_io.json", "w"), indent=1)

m2 = {
    "model_data": {"unit_type": "LSTM", "input_size": 1, "hidden_size": 2, "skip": 0, "epochs": 300, "loss": 0.0123},
    "state_dict": {
        "rec.weight_ih_l0": [0.1, -0.2, 0.3, -0.4, 0.5, -0.6, 0.7, -0.8],
        "rec.weight_hh_l0": [[0.01 * i + 0.02 * j for j in range(2)] for i in range(8)],
        "rec.bias_ih_l0": [0.1] * 8,
        "rec.bias_hh_l0": [-0.05] * 8,
        "lin.weight": [[0.5, -0.25]],
        "lin.bias": [0.125],
    },
}
json.dump(m2, open("lstm_h2_flat.json", "w"), indent=1)
g = json.loads(json.dumps(m2))
g["model_data"]["unit_type"] = "GRU"
json.dump(g, open("gru_rejected.json", "w"), indent=1)
t = json.loads(json.dumps(m2))
t["state_dict"]["rec.weight_hh_l0"] = t["state_dict"]["rec.weight_hh_l0"][:7]
json.dump(t, open("lstm_truncated_array.json", "w"), indent=1)

import wave

tone = np.round(0.5 * np.sin(2 * np.pi * 1000 * np.arange(22050) / 44100) * 32767).astype("<i2")
with wave.open("sine_1k_44100.wav", "wb") as w:
    w.setnchannels(1)
    w.setsampwidth(2)
    w.setframerate(44100)
    w.writeframes(tone.tobytes())
