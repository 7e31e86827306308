# Copyright 2026 The caplens Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Multilingual caption annotation and probing toolkit."""

try:
    from . import _caplens as _ext
except ImportError:  # built in-tree: the extension sits next to the package
    import _caplens as _ext

CaplensError = _ext.CaplensError
FormatError = _ext.FormatError
ValidationError = _ext.ValidationError
UnsupportedLanguage = _ext.UnsupportedLanguage
DegenerateData = _ext.DegenerateData
PropertyLabel = _ext.PropertyLabel

annotate = _ext.annotate
numerals = _ext.numerals
pearson = _ext.pearson
gamma_scale = _ext.gamma_scale
rbf = _ext.rbf
read_embeddings = _ext.read_embeddings
write_embeddings = _ext.write_embeddings
corpus_summary = _ext.corpus_summary
run = _ext.run

__all__ = [
    "CaplensError",
    "DegenerateData",
    "FormatError",
    "PropertyLabel",
    "UnsupportedLanguage",
    "ValidationError",
    "annotate",
    "corpus_summary",
    "gamma_scale",
    "numerals",
    "pearson",
    "rbf",
    "read_embeddings",
    "run",
    "write_embeddings",
]
