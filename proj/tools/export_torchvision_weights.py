# Copyright 2026 The TENet Authors. All Rights Reserved.
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

"""Exports torchvision backbone weights for the C++ backbones.

Writes the state dict of a torchvision model with torch.save. The C++ side
loads it with load_python_state_dict, skipping the replaced final layer.

  python3 export_torchvision_weights.py --backbone resnet50 --out resnet50.pt

With --random the model keeps its random initialization, with batch-norm
running statistics perturbed, and --reference additionally writes an input
batch and the matching backbone features (final layer replaced by identity).
The backbone tests use this to compare the two implementations.
"""

import argparse

import torch
import torchvision

REPLACED = {
    "resnet50": lambda m: setattr(m, "fc", torch.nn.Identity()),
    "regnet_y_400mf": lambda m: setattr(m, "fc", torch.nn.Identity()),
    "mobilenet_v3_small": lambda m: m.classifier.__setitem__(3, torch.nn.Identity()),
    "convnext_small": lambda m: m.classifier.__setitem__(2, torch.nn.Identity()),
    "swin_v2_b": lambda m: setattr(m, "head", torch.nn.Identity()),
    "vit_b_16": lambda m: setattr(m, "heads", torch.nn.Identity()),
}


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--backbone", required=True, choices=sorted(REPLACED))
    parser.add_argument("--out", required=True, help="state dict output path")
    parser.add_argument("--random", action="store_true",
                        help="skip pretrained weights; randomize BN statistics")
    parser.add_argument("--reference", help="write input and features here")
    parser.add_argument("--size", type=int, default=96, help="reference image size")
    parser.add_argument("--batch", type=int, default=2)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    torch.manual_seed(args.seed)
    weights = None if args.random else "DEFAULT"
    model = torchvision.models.get_model(args.backbone, weights=weights)
    if args.random:
        with torch.no_grad():
            for module in model.modules():
                if isinstance(module, torch.nn.BatchNorm2d):
                    module.running_mean.uniform_(-0.2, 0.2)
                    module.running_var.uniform_(0.5, 1.5)
                    module.weight.uniform_(0.5, 1.5)
                    module.bias.uniform_(-0.2, 0.2)
                elif isinstance(module, torch.nn.LayerNorm):
                    module.weight.uniform_(0.5, 1.5)
                    module.bias.uniform_(-0.2, 0.2)
            for name, param in model.named_parameters():
                if name.endswith("layer_scale"):
                    param.uniform_(0.5, 1.5)
    model.eval()
    state = {k: v.detach().contiguous() for k, v in model.state_dict().items()}
    torch.save(state, args.out)

    if args.reference:
        REPLACED[args.backbone](model)
        x = torch.randn(args.batch, 3, args.size, args.size)
        with torch.no_grad():
            features = model(x)
        torch.save({"input": x, "output": features.contiguous()}, args.reference)


if __name__ == "__main__":
    main()
