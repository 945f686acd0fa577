#!/usr/bin/env python3
"""Export torchvision ResNet-50 weights as an archive the C++ backbone loader reads.

Usage: python3 tools/export_resnet50.py resnet50_imagenet.pt [--random]
Then set "pretrained": "resnet50_imagenet.pt" and "backbone": "resnet50" in the reid config.
"""
import argparse

import torch
import torchvision


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("output")
    parser.add_argument("--random", action="store_true", help="skip the ImageNet download (layout checks only)")
    args = parser.parse_args()
    weights = None if args.random else torchvision.models.ResNet50_Weights.IMAGENET1K_V1
    model = torchvision.models.resnet50(weights=weights).eval()
    torch.jit.save(torch.jit.script(model), args.output)


if __name__ == "__main__":
    main()
