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

#include "mrd/game_io.h"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace mrd {
namespace {

struct Token {
  std::string text;
  int column = 0;
};

struct Line {
  int number = 0;
  std::vector<Token> tokens;
};

std::vector<Line> Tokenize(const std::string& text) {
  std::vector<Line> lines;
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    Line line;
    line.number = number;
    size_t i = 0;
    while (i < raw.size()) {
      while (i < raw.size() && (raw[i] == ' ' || raw[i] == '\t')) ++i;
      if (i >= raw.size()) break;
      const size_t start = i;
      while (i < raw.size() && raw[i] != ' ' && raw[i] != '\t') ++i;
      line.tokens.push_back({raw.substr(start, i - start),
                             static_cast<int>(start) + 1});
    }
    lines.push_back(std::move(line));
  }
  // Drop trailing blank lines.
  while (!lines.empty() && lines.back().tokens.empty()) lines.pop_back();
  return lines;
}

std::string Where(int line, int column) {
  std::string out = "line " + std::to_string(line);
  if (column > 0) out += ", column " + std::to_string(column);
  return out;
}

double ParseDouble(const Token& tok, int line) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(tok.text.c_str(), &end);
  if (end != tok.text.c_str() + tok.text.size() || errno == ERANGE ||
      !std::isfinite(v)) {
    throw ParseError("malformed number '" + tok.text + "'", line, tok.column);
  }
  return v;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("write failed for " + path);
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ParseError::ParseError(const std::string& message, int line, int column)
    : ValidationError(Where(line, column) + ": " + message),
      line_(line),
      column_(column) {}

Game ParseGame(const std::string& text) {
  const std::vector<Line> lines = Tokenize(text);
  if (lines.empty() || lines[0].tokens.empty()) {
    throw ParseError("missing dimension header", 1, 0);
  }
  const Line& header = lines[0];
  if (header.tokens.size() != 1) {
    throw ParseError("header must hold only n", 1, header.tokens[1].column);
  }
  const Token& ntok = header.tokens[0];
  char* end = nullptr;
  errno = 0;
  const long n = std::strtol(ntok.text.c_str(), &end, 10);
  if (end != ntok.text.c_str() + ntok.text.size() || errno == ERANGE ||
      n < 1 || n > 100000) {
    throw ParseError("invalid dimension '" + ntok.text + "'", 1, ntok.column);
  }
  const int dim = static_cast<int>(n);
  MatrixXd c(dim, dim);
  for (int r = 0; r < dim; ++r) {
    if (r + 1 >= static_cast<int>(lines.size())) {
      throw ParseError("expected " + std::to_string(dim) + " rows, found " +
                           std::to_string(r),
                       r + 2, 0);
    }
    const Line& line = lines[r + 1];
    if (static_cast<int>(line.tokens.size()) != dim) {
      const int col = static_cast<int>(line.tokens.size()) > dim
                          ? line.tokens[dim].column
                          : 0;
      throw ParseError("expected " + std::to_string(dim) + " entries, found " +
                           std::to_string(line.tokens.size()),
                       line.number, col);
    }
    for (int j = 0; j < dim; ++j) {
      const double v = ParseDouble(line.tokens[j], line.number);
      if (!(v > 0.0 && v <= 1.0)) {
        throw ParseError("entry " + line.tokens[j].text + " outside (0, 1]",
                         line.number, line.tokens[j].column);
      }
      c(r, j) = v;
    }
  }
  if (static_cast<int>(lines.size()) > dim + 1) {
    throw ParseError("unexpected data after " + std::to_string(dim) + " rows",
                     lines[dim + 1].number, 0);
  }
  return Game::FromMatrix(std::move(c));
}

Game ReadGame(const std::string& path) { return ParseGame(ReadFile(path)); }

std::string FormatGame(const Game& g) {
  std::string out = std::to_string(g.n()) + "\n";
  for (int i = 0; i < g.n(); ++i) {
    for (int j = 0; j < g.n(); ++j) {
      if (j > 0) out += ' ';
      out += FormatDouble(g.C()(i, j));
    }
    out += '\n';
  }
  return out;
}

void WriteGame(const Game& g, const std::string& path) {
  WriteFile(path, FormatGame(g));
}

Strategy ParseStrategy(const std::string& text, int n) {
  const std::vector<Line> lines = Tokenize(text);
  if (lines.empty() || lines[0].tokens.empty()) {
    throw ParseError("missing strategy line", 1, 0);
  }
  if (lines.size() > 1) {
    throw ParseError("strategy must be a single line", lines[1].number, 0);
  }
  const Line& line = lines[0];
  if (n > 0 && static_cast<int>(line.tokens.size()) != n) {
    throw ParseError("expected " + std::to_string(n) + " entries, found " +
                         std::to_string(line.tokens.size()),
                     line.number, 0);
  }
  VectorXd x(line.tokens.size());
  for (size_t i = 0; i < line.tokens.size(); ++i) {
    const double v = ParseDouble(line.tokens[i], line.number);
    if (v < 0.0) {
      throw ParseError("negative entry " + line.tokens[i].text, line.number,
                       line.tokens[i].column);
    }
    x[static_cast<Eigen::Index>(i)] = v;
  }
  const double sum = x.sum();
  if (std::abs(sum - 1.0) > kStrategySumTol) {
    throw ParseError("entries sum to " + FormatDouble(sum) + ", not 1",
                     line.number, 0);
  }
  return Strategy::FromWeights(std::move(x));
}

Strategy ReadStrategy(const std::string& path, int n) {
  return ParseStrategy(ReadFile(path), n);
}

std::string FormatStrategy(const Strategy& s) {
  std::string out;
  for (int i = 0; i < s.size(); ++i) {
    if (i > 0) out += ' ';
    out += FormatDouble(s[i]);
  }
  out += '\n';
  return out;
}

void WriteStrategy(const Strategy& s, const std::string& path) {
  WriteFile(path, FormatStrategy(s));
}

}  // namespace mrd
