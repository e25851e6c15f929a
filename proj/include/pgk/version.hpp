// Copyright 2026 The pgk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PGK_VERSION_HPP
#define PGK_VERSION_HPP

namespace pgk {

inline constexpr const char* version_string = "0.1.0";

// Bumped whenever the on-disk cache layout changes; readers reject
// segments written by a different version.
inline constexpr unsigned cache_format_version = 1;

}  // namespace pgk

#endif  // PGK_VERSION_HPP
