#!/usr/bin/env python3
"""Writes the bundled model files under data/models/.

Layer shapes follow the standard published definitions of each network with
batch norm folded into the convolutions. Run from the repository root:

    python3 tools/scripts/gen_models.py
"""

import pathlib


class Builder:
    def __init__(self, name, h, w, c):
        self.lines = [f"model {name}"]
        self.shape = (h, w, c)
        self.last = None
        self.count = {}

    def _name(self, stem):
        self.count[stem] = self.count.get(stem, 0) + 1
        return f"{stem}{self.count[stem]}"

    @staticmethod
    def _out(n, k, pad, stride):
        return (n + 2 * pad - k) // stride + 1

    def _emit(self, kind, name, shape, extra, src=None):
        h, w, c = shape
        line = f"{kind} name={name} in={h}x{w}x{c}"
        if extra:
            line += " " + extra
        if src is not None:
            line += f" src={src}"
        self.lines.append(line)
        self.last = name

    def conv(self, k, ck, stride=1, pad=0, groups=1, name=None, src=None, shape=None, pin=None):
        shape = shape or self.shape
        name = name or self._name("conv")
        extra = f"k={k}x{k}x{ck} stride={stride} pad={pad}"
        if groups != 1:
            extra += f" groups={groups}"
        if pin is not None:
            extra += f" pin={pin}"
        self._emit("conv", name, shape, extra, src)
        h, w, _ = shape
        self.shape = (self._out(h, k, pad, stride), self._out(w, k, pad, stride), ck)
        return name

    def relu(self, name=None):
        name = name or self._name("relu")
        self._emit("relu", name, self.shape, "")
        return name

    def pool(self, kind, z, stride, pad=0, name=None):
        name = name or self._name(kind)
        self._emit(kind, name, self.shape, f"z={z} stride={stride} pad={pad}")
        h, w, c = self.shape
        self.shape = (self._out(h, z, pad, stride), self._out(w, z, pad, stride), c)
        return name

    def fc(self, out, name=None, pin=None):
        name = name or self._name("fc")
        self._emit("fc", name, self.shape, f"out={out}" + (f" pin={pin}" if pin else ""))
        self.shape = (1, 1, out)
        return name

    def add(self, main, skip, shape, name=None):
        name = name or self._name("add")
        self._emit("residual_add", name, shape, f"skip={skip}", src=main)
        self.shape = shape
        return name

    def text(self):
        return "\n".join(self.lines) + "\n"


def alexnet():
    b = Builder("alexnet", 227, 227, 3)
    b.conv(11, 96, stride=4)
    b.relu()
    b.pool("maxpool", 3, 2)
    b.conv(5, 256, pad=2, groups=2)
    b.relu()
    b.pool("maxpool", 3, 2)
    b.conv(3, 384, pad=1)
    b.relu()
    b.conv(3, 384, pad=1, groups=2)
    b.relu()
    b.conv(3, 256, pad=1, groups=2)
    b.relu()
    b.pool("maxpool", 3, 2)
    b.fc(4096)
    b.relu()
    b.fc(4096)
    b.relu()
    b.fc(1000)
    return b.text()


def vgg16():
    b = Builder("vgg16", 224, 224, 3)
    for stage, (convs, ch) in enumerate([(2, 64), (2, 128), (3, 256), (3, 512), (3, 512)], 1):
        for _ in range(convs):
            b.conv(3, ch, pad=1)
            b.relu()
        b.pool("maxpool", 2, 2)
    b.fc(4096)
    b.relu()
    b.fc(4096)
    b.relu()
    b.fc(1000)
    return b.text()


def resnet(name, depth_cfg, bottleneck, pin_ends):
    b = Builder(name, 224, 224, 3)
    pin = 8 if pin_ends else None
    b.conv(7, 64, stride=2, pad=3, pin=pin)
    b.relu()
    block_in = b.pool("maxpool", 3, 2, pad=1)
    in_ch = 64
    for stage, blocks in enumerate(depth_cfg):
        width = 64 * 2 ** stage
        out_ch = width * 4 if bottleneck else width
        for i in range(blocks):
            stride = 2 if (i == 0 and stage > 0) else 1
            in_shape = b.shape
            if bottleneck:
                b.conv(1, width, src=block_in if b.last != block_in else None)
                b.relu()
                b.conv(3, width, stride=stride, pad=1)
                b.relu()
                main = b.conv(1, out_ch)
            else:
                b.conv(3, width, stride=stride, pad=1, src=block_in if b.last != block_in else None)
                b.relu()
                main = b.conv(3, width, pad=1)
            out_shape = b.shape
            skip = block_in
            if stride != 1 or in_ch != out_ch:
                skip = b.conv(1, out_ch, stride=stride, src=block_in, shape=in_shape)
            b.add(main, skip, out_shape)
            block_in = b.relu()
            in_ch = out_ch
    b.pool("avgpool", 7, 1)
    b.fc(1000, pin=pin)
    return b.text()


def main():
    out = pathlib.Path(__file__).resolve().parents[2] / "data" / "models"
    out.mkdir(parents=True, exist_ok=True)
    models = {
        "alexnet": alexnet(),
        "vgg16": vgg16(),
        "resnet50": resnet("resnet50", [3, 4, 6, 3], True, False),
        "resnet18": resnet("resnet18", [2, 2, 2, 2], False, True),
    }
    for name, text in models.items():
        (out / f"{name}.model").write_text(text)
        print(f"wrote {out / (name + '.model')}")


if __name__ == "__main__":
    main()
