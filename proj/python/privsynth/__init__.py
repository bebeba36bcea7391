# Copyright 2026 The Privsynth Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python access to the privsynth pipeline."""

import json
import os
import tempfile

from ._privsynth import Error, entropy_bits, image_mi_bits, parse_preference
from ._privsynth import run_cli

__all__ = [
    "CommandError",
    "Error",
    "entropy_bits",
    "error_info",
    "image_mi_bits",
    "parse_preference",
    "run",
    "tradeoff",
]


class CommandError(RuntimeError):
    """A privsynth command exited nonzero."""

    def __init__(self, code, stderr):
        super().__init__(stderr.strip())
        self.code = code
        self.info = error_info(stderr)


def error_info(text):
    """The "error" object of a JSON error line, or {} when unparsable."""
    try:
        return json.loads(str(text)).get("error", {})
    except (ValueError, AttributeError):
        return {}


def run(*args):
    """Runs a privsynth subcommand in process and returns its stdout."""
    code, out, err = run_cli([str(a) for a in args])
    if code != 0:
        raise CommandError(code, err)
    return out


def tradeoff(corpus, preferences, **options):
    """Runs the trade-off experiment on a corpus directory.

    Keyword options map onto command-line flags (count=8 -> --count 8;
    True adds a bare flag). Returns the parsed JSON rows.
    """
    if not isinstance(preferences, str):
        preferences = ";".join(preferences)
    with tempfile.TemporaryDirectory() as tmp:
        args = ["tradeoff", "--corpus", corpus, "--preferences", preferences,
                "--out", os.path.join(tmp, "table.csv"),
                "--json", os.path.join(tmp, "table.json")]
        for key, value in options.items():
            flag = "--" + key.replace("_", "-")
            if value is True:
                args.append(flag)
            elif value is not False and value is not None:
                args += [flag, value]
        run(*args)
        with open(os.path.join(tmp, "table.json")) as f:
            return json.load(f)["rows"]
