# Copyright 2026 The Cyclotrack Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ==============================================================================
"""Exports small random torch networks as weight bundles plus .t32 pairs.

The outputs under tests/fixtures are produced by torch, so the native
executor is checked against an implementation it shares no code with.

    python3 tools/make_parity_fixtures.py tests/fixtures
"""

import hashlib
import json
import pathlib
import struct
import sys

import numpy as np
import torch

PAIRS = 32


def write_t32(path, array):
    array = np.ascontiguousarray(array, dtype="<f4")
    with open(path, "wb") as f:
        f.write(b"T32\0")
        f.write(struct.pack("<I", array.ndim))
        f.write(struct.pack("<%dI" % array.ndim, *array.shape))
        f.write(array.tobytes())


def tensor_entry(name, t):
    return {"name": name, "shape": list(t.shape)}


def export(path, modules, input_shape, output, scale):
    blob = bytearray()
    layers = []

    def put(t):
        blob.extend(np.ascontiguousarray(t.detach().numpy(), dtype="<f4").tobytes())

    for m in modules:
        if isinstance(m, torch.nn.Conv2d):
            layers.append({
                "type": "conv2d", "out_ch": m.out_channels, "in_ch": m.in_channels,
                "kernel": list(m.kernel_size), "stride": m.stride[0], "pad": m.padding[0],
                "tensors": [tensor_entry("weight", m.weight), tensor_entry("bias", m.bias)]})
            put(m.weight)
            put(m.bias)
        elif isinstance(m, torch.nn.ReLU):
            layers.append({"type": "relu"})
        elif isinstance(m, torch.nn.MaxPool2d):
            layers.append({"type": "maxpool", "kernel": m.kernel_size, "stride": m.stride})
        elif isinstance(m, torch.nn.Flatten):
            layers.append({"type": "flatten"})
        elif isinstance(m, torch.nn.Linear):
            layers.append({
                "type": "dense", "out": m.out_features, "in": m.in_features,
                "tensors": [tensor_entry("weight", m.weight), tensor_entry("bias", m.bias)]})
            put(m.weight)
            put(m.bias)
        elif isinstance(m, torch.nn.LSTM):
            layers.append({
                "type": "lstm", "hidden": m.hidden_size, "input": m.input_size,
                "tensors": [tensor_entry("w_ih", m.weight_ih_l0),
                            tensor_entry("w_hh", m.weight_hh_l0),
                            tensor_entry("b_ih", m.bias_ih_l0),
                            tensor_entry("b_hh", m.bias_hh_l0)]})
            for t in (m.weight_ih_l0, m.weight_hh_l0, m.bias_ih_l0, m.bias_hh_l0):
                put(t)
        else:
            raise TypeError(type(m))
    blob_name = path.name.replace(".wb.json", ".wb.bin")
    (path.parent / blob_name).write_bytes(bytes(blob))
    manifest = {
        "format": "cyclotrack.weight_bundle", "version": 1, "dtype": "float32",
        "byte_order": "little", "input_shape": list(input_shape),
        "input_scale": scale, "output": output, "blob": blob_name,
        "blob_sha256": hashlib.sha256(bytes(blob)).hexdigest(), "layers": layers}
    path.write_text(json.dumps(manifest, indent=2) + "\n")


def main(out_dir):
    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    torch.manual_seed(7)
    gen = np.random.default_rng(7)

    cnn = [torch.nn.Conv2d(1, 4, 3, stride=1, padding=1), torch.nn.ReLU(),
           torch.nn.MaxPool2d(2, 2), torch.nn.Conv2d(4, 6, 3, stride=2, padding=0),
           torch.nn.ReLU(), torch.nn.Flatten(0), torch.nn.Linear(6 * 3 * 3, 10),
           torch.nn.ReLU(), torch.nn.Linear(10, 1)]
    export(out / "cnn.wb.json", cnn, (1, 16, 16), "wind_kt", 1.0)
    net = torch.nn.Sequential(*cnn)
    with torch.no_grad():
        for k in range(PAIRS):
            x = gen.standard_normal((1, 16, 16)).astype(np.float32)
            y = net(torch.from_numpy(x)).numpy()
            write_t32(out / ("cnn_in_%02d.t32" % k), x)
            write_t32(out / ("cnn_out_%02d.t32" % k), y)

    stem = [torch.nn.Conv2d(1, 3, 3, stride=2, padding=1), torch.nn.ReLU(),
            torch.nn.MaxPool2d(2, 2), torch.nn.Flatten(0), torch.nn.Linear(3 * 3 * 3, 8),
            torch.nn.ReLU()]
    lstm = torch.nn.LSTM(8, 5)
    head = torch.nn.Linear(5, 1)
    export(out / "cnn_lstm.wb.json", stem + [lstm, head], (3, 1, 12, 12), "wind_kt", 1.0)
    stem_net = torch.nn.Sequential(*stem)
    with torch.no_grad():
        for k in range(PAIRS):
            x = gen.standard_normal((3, 1, 12, 12)).astype(np.float32)
            feats = torch.stack([stem_net(torch.from_numpy(f)) for f in x])
            _, (h, _) = lstm(feats.unsqueeze(1))
            y = head(h[0, 0]).numpy()
            write_t32(out / ("cnn_lstm_in_%02d.t32" % k), x)
            write_t32(out / ("cnn_lstm_out_%02d.t32" % k), y)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures")
