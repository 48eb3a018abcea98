// Copyright 2026 The mrd Authors
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

#ifndef MRD_GAME_IO_H_
#define MRD_GAME_IO_H_

#include <string>

#include "mrd/game.h"

// Text formats.
//
// Game file:      line 1 is n; lines 2..n+1 hold n whitespace-separated
//                 decimals each, every entry in (0, 1].
// Strategy file:  one line of n nonnegative decimals. A sum within 1e-9 of
//                 one is renormalized; anything else is rejected.
//
// Blank lines after the data are ignored. Numbers are written with %.17g so
// that write followed by read reproduces every double.
namespace mrd {

// Line and column are 1-based and point at the offending token (column 0
// when the error concerns a whole line or a missing line).
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& message, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

inline constexpr double kStrategySumTol = 1e-9;

Game ParseGame(const std::string& text);
Game ReadGame(const std::string& path);
std::string FormatGame(const Game& g);
void WriteGame(const Game& g, const std::string& path);

// `n` > 0 additionally requires exactly n entries.
Strategy ParseStrategy(const std::string& text, int n = 0);
Strategy ReadStrategy(const std::string& path, int n = 0);
std::string FormatStrategy(const Strategy& s);
void WriteStrategy(const Strategy& s, const std::string& path);

}  // namespace mrd

#endif  // MRD_GAME_IO_H_
