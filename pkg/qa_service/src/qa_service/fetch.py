"""Download model files into a local directory over plain HTTP.

Useful where the hub client cannot negotiate its metadata flow (mirrors,
proxies): files are fetched from <endpoint>/<model>/resolve/main/<name>.
The endpoint defaults to https://huggingface.co and honors HF_ENDPOINT.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import requests

REQUIRED_FILES = ["config.json", "tokenizer_config.json"]
TOKENIZER_FILES = ["vocab.txt", "tokenizer.json", "vocab.json", "merges.txt"]
WEIGHT_FILES = ["model.safetensors", "pytorch_model.bin"]

DEFAULT_ENDPOINT = "https://huggingface.co"


def fetch_file(endpoint: str, model: str, name: str, dest: Path) -> bool:
    url = f"{endpoint.rstrip('/')}/{model}/resolve/main/{name}"
    try:
        with requests.get(url, stream=True, timeout=60) as resp:
            if resp.status_code != 200:
                return False
            target = dest / name
            with open(target, "wb") as fh:
                for chunk in resp.iter_content(chunk_size=1 << 20):
                    fh.write(chunk)
            print(f"fetched {name} ({target.stat().st_size} bytes)")
            return True
    except requests.RequestException as exc:
        print(f"failed to fetch {name}: {exc}", file=sys.stderr)
        return False


def fetch_model(model: str, dest: str, endpoint: str | None = None) -> int:
    endpoint = endpoint or os.environ.get("HF_ENDPOINT", DEFAULT_ENDPOINT)
    dest_path = Path(dest)
    dest_path.mkdir(parents=True, exist_ok=True)
    for name in REQUIRED_FILES:
        if not fetch_file(endpoint, model, name, dest_path):
            print(f"required file {name} unavailable", file=sys.stderr)
            return 1
    got_tokenizer = False
    for name in TOKENIZER_FILES:
        got_tokenizer = fetch_file(endpoint, model, name, dest_path) or got_tokenizer
    if not got_tokenizer:
        print("no tokenizer vocabulary file found", file=sys.stderr)
        return 1
    for name in WEIGHT_FILES:
        if fetch_file(endpoint, model, name, dest_path):
            return 0
    print("no model weight file found", file=sys.stderr)
    return 1


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="qa-service-fetch", description=__doc__
    )
    parser.add_argument(
        "--model",
        default="distilbert-base-uncased-distilled-squad",
        help="model identifier on the hub",
    )
    parser.add_argument("--dest", required=True, help="target directory")
    parser.add_argument("--endpoint", help="hub endpoint (default: HF_ENDPOINT env)")
    args = parser.parse_args(argv)
    return fetch_model(args.model, args.dest, args.endpoint)


if __name__ == "__main__":
    sys.exit(main())
