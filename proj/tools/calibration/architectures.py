# Copyright 2026 The blockdvfs Authors.
# SPDX-License-Identifier: Apache-2.0
"""Dense operator shapes of the four fixture networks (224x224 input, fp16).

Work is 2 * MACs. Bytes are weights plus input and output activations.
Edges follow the data flow, including residual branches.
"""

from model import Op

BYTES = 2


def conv(name, cin, cout, k, hin, stride):
    hout = hin // stride
    macs = cin * cout * k * k * hout * hout
    byts = BYTES * (cin * cout * k * k + cin * hin * hin + cout * hout * hout)
    return Op(name, "conv", 2.0 * macs, float(byts)), hout


def linear(name, tokens, din, dout, kind="linear"):
    macs = tokens * din * dout
    byts = BYTES * (din * dout + tokens * din + tokens * dout)
    return Op(name, kind, 2.0 * macs, float(byts))


def resnet18():
    ops, edges = [], []
    op, h = conv("conv1", 3, 64, 7, 224, 2)
    ops.append(op)
    h //= 2  # max pool
    tails = ["conv1"]
    cin = 64
    for layer, cout in enumerate([64, 128, 256, 512], start=1):
        for blk in range(2):
            stride = 2 if (layer > 1 and blk == 0) else 1
            p = f"layer{layer}.{blk}"
            a, h2 = conv(f"{p}.conv1", cin, cout, 3, h, stride)
            b, _ = conv(f"{p}.conv2", cout, cout, 3, h2, 1)
            ops += [a, b]
            edges += [(t, a.id) for t in tails] + [(a.id, b.id)]
            new_tails = [b.id]
            if stride == 2:
                ds, _ = conv(f"{p}.downsample", cin, cout, 1, h, 2)
                ops.append(ds)
                edges += [(t, ds.id) for t in tails]
                new_tails.append(ds.id)
            tails, cin, h = new_tails, cout, h2
    fc = linear("fc", 1, 512, 1000)
    ops.append(fc)
    edges += [(t, fc.id) for t in tails]
    return "resnet18", ops, edges


def resnet101():
    ops, edges = [], []
    op, h = conv("conv1", 3, 64, 7, 224, 2)
    ops.append(op)
    h //= 2
    tails = ["conv1"]
    cin = 64
    for layer, (width, blocks) in enumerate([(64, 3), (128, 4), (256, 23), (512, 3)], start=1):
        cout = width * 4
        for blk in range(blocks):
            stride = 2 if (layer > 1 and blk == 0) else 1
            p = f"layer{layer}.{blk}"
            a, _ = conv(f"{p}.conv1", cin, width, 1, h, 1)
            b, h2 = conv(f"{p}.conv2", width, width, 3, h, stride)
            c, _ = conv(f"{p}.conv3", width, cout, 1, h2, 1)
            ops += [a, b, c]
            edges += [(t, a.id) for t in tails] + [(a.id, b.id), (b.id, c.id)]
            new_tails = [c.id]
            if blk == 0:
                ds, _ = conv(f"{p}.downsample", cin, cout, 1, h, stride)
                ops.append(ds)
                edges += [(t, ds.id) for t in tails]
                new_tails.append(ds.id)
            tails, cin, h = new_tails, cout, h2
    fc = linear("fc", 1, 2048, 1000)
    ops.append(fc)
    edges += [(t, fc.id) for t in tails]
    return "resnet101", ops, edges


def vit(name, dim, depth, mlp):
    tokens = 197
    ops, edges = [], []
    pe = Op("patch_embed", "conv", 2.0 * 3 * dim * 16 * 16 * 196,
            float(BYTES * (3 * dim * 256 + 3 * 224 * 224 + 196 * dim)))
    ops.append(pe)
    prev = pe.id
    for i in range(depth):
        p = f"blocks.{i}"
        macs = tokens * dim * 3 * dim + 2 * tokens * tokens * dim + tokens * dim * dim
        byts = BYTES * (4 * dim * dim + 4 * tokens * dim + 2 * tokens * tokens * 12)
        attn = Op(f"{p}.attn", "attention", 2.0 * macs, float(byts))
        fc1 = linear(f"{p}.mlp.fc1", tokens, dim, mlp)
        fc2 = linear(f"{p}.mlp.fc2", tokens, mlp, dim)
        ops += [attn, fc1, fc2]
        # Residual adds feed the next attention from both the MLP and the
        # attention output.
        edges += [(prev, attn.id), (attn.id, fc1.id), (fc1.id, fc2.id)]
        if i > 0:
            edges.append((f"blocks.{i - 1}.attn", attn.id))
        prev = fc2.id
    head = linear("head", 1, dim, 1000)
    ops.append(head)
    edges.append((prev, head.id))
    return name, ops, edges


def vit_b16():
    return vit("vit_b16", 768, 12, 3072)


def vit_l16():
    return vit("vit_l16", 1024, 24, 4096)


ALL = {"resnet18": resnet18, "resnet101": resnet101, "vit_b16": vit_b16, "vit_l16": vit_l16}
