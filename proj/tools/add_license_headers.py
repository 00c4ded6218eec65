#!/usr/bin/env python3
"""Prepend the Apache-2.0 header to every source, header and CMake file."""

import pathlib
import sys

MARK = "Licensed under the Apache License, Version 2.0"

BODY = """Copyright 2026  segaw authors

See {copying} for clarification regarding multiple authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

 http://www.apache.org/licenses/LICENSE-2.0

THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
MERCHANTABLITY OR NON-INFRINGEMENT.
See the Apache 2 License for the specific language governing permissions and
limitations under the License."""


def header(rel, prefix):
    depth = len(rel.parts) - 1
    copying = "/".join([".."] * depth + ["COPYING"])
    lines = [rel.as_posix(), ""] + BODY.format(copying=copying).split("\n")
    out = []
    for i, line in enumerate(lines):
        # A blank line without a comment marker separates the path and copyright blocks.
        if i in (1, 3):
            out.append("")
        else:
            out.append((prefix + " " + line).rstrip() if line else prefix)
    return "\n".join(out) + "\n\n"


def main():
    root = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else ".").resolve()
    dirs = ["include", "src", "tests", "tools"]
    files = [root / "CMakeLists.txt"]
    for d in dirs:
        files += sorted((root / d).rglob("*"))
    changed = 0
    for f in files:
        if f.suffix in (".cc", ".h"):
            prefix = "//"
        elif f.name == "CMakeLists.txt" or f.suffix == ".py":
            prefix = "#"
        else:
            continue
        text = f.read_text()
        if MARK in text:
            continue
        rel = f.relative_to(root)
        shebang = ""
        if text.startswith("#!"):
            shebang, _, text = text.partition("\n")
            shebang += "\n"
        f.write_text(shebang + header(rel, prefix) + text)
        changed += 1
    print(f"{changed} files updated")


if __name__ == "__main__":
    main()
