#!/usr/bin/env python
"""Write the deterministic phantom suite (images, truth masks, specs) to a directory."""

from __future__ import annotations

import argparse
import itertools
import json
import logging
import sys
from pathlib import Path

from dotenv import load_dotenv

BASE_DIR = Path(__file__).resolve().parents[1]
if str(BASE_DIR) not in sys.path:
    sys.path.append(str(BASE_DIR))

load_dotenv()

from vesselseg.observability.logging import configure_logging
from vesselseg.services.image_core import save_image, save_mask
from vesselseg.services.phantom import SUITE_FAMILIES, SUITE_NOISE_LEVELS, SUITE_SEEDS, phantom_spec, render

logger = logging.getLogger(__name__)

SEED_VERSION = "suite.v1"


def phantom_name(family: str, noise_sigma: float, rng_seed: int) -> str:
    return f"{family}_n{int(round(noise_sigma * 100)):02d}_s{rng_seed}"


def seed_suite(output_dir: Path, size: int) -> list[dict[str, object]]:
    """Render every suite phantom once; existing files are left untouched."""
    output_dir.mkdir(parents=True, exist_ok=True)
    entries: list[dict[str, object]] = []
    created = 0
    for family, noise_sigma in itertools.product(SUITE_FAMILIES, SUITE_NOISE_LEVELS):
        for rng_seed in SUITE_SEEDS:
            spec = phantom_spec(family, size, size, noise_sigma=noise_sigma, rng_seed=rng_seed)
            name = phantom_name(family, spec.noise_sigma, rng_seed)
            image_path = output_dir / f"{name}.png"
            truth_path = output_dir / f"{name}_truth.png"
            spec_path = output_dir / f"{name}.json"
            if not (image_path.exists() and truth_path.exists() and spec_path.exists()):
                img, truth = render(spec)
                save_image(img, image_path)
                save_mask(truth, truth_path)
                spec_path.write_text(spec.model_dump_json(indent=2), encoding="utf-8")
                created += 1
            entries.append(
                {
                    "name": name,
                    "family": family,
                    "noise_sigma": spec.noise_sigma,
                    "rng_seed": rng_seed,
                    "image": image_path.name,
                    "truth": truth_path.name,
                }
            )

    manifest = {"version": SEED_VERSION, "size": size, "phantoms": entries}
    (output_dir / "manifest.json").write_text(json.dumps(manifest, indent=2), encoding="utf-8")
    logger.info("Phantom suite in %s: %d entries, %d newly rendered", output_dir, len(entries), created)
    return entries


def main() -> None:
    parser = argparse.ArgumentParser(description="Render the phantom suite for local experiments")
    parser.add_argument("output_dir", type=Path, help="Directory to write phantoms into")
    parser.add_argument("--size", type=int, default=128, help="Side length in pixels (default: 128)")
    args = parser.parse_args()

    configure_logging(logging.INFO)
    entries = seed_suite(args.output_dir, args.size)
    print(f"Seeded {len(entries)} phantoms into {args.output_dir}")


if __name__ == "__main__":
    main()
