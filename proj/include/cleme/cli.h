// Copyright 2026 The Cleme Authors.
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

#ifndef CLEME_CLI_H_
#define CLEME_CLI_H_

#include <iosfwd>
#include <string>
#include <string_view>

namespace cleme {

// Entry point behind the `cleme` binary. Exit codes: 0 success, 1 I/O or
// parse failure, 2 bad flags.
int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err);

// Hex SHA-256 of a byte string.
std::string Sha256Hex(std::string_view bytes);

}  // namespace cleme

#endif  // CLEME_CLI_H_
