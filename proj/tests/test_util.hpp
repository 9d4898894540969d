#pragma once

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "somdsa/model.hpp"

namespace testutil {

// Instance with unit severity on every channel for each listed SC pair.
inline somdsa::model::NetworkInstance make_instance(
    int S, int C, std::vector<int> R,
    const std::vector<std::pair<int, int>>& pairs = {}, int severity = 1) {
  somdsa::model::NetworkInstance inst;
  inst.S = S;
  inst.C = C;
  inst.R = std::move(R);
  inst.I = somdsa::model::InterferenceTensor::zeros(S, C);
  for (const auto& [a, b] : pairs) {
    for (int m = 0; m < C; ++m) {
      inst.I.at(a, b, m) = severity;
      inst.I.at(b, a, m) = severity;
    }
  }
  return inst;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

struct TempDir {
  std::string path;

  TempDir() {
    std::string tmpl =
        (std::filesystem::temp_directory_path() / "somdsa-XXXXXX").string();
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    if (mkdtemp(buf.data()) == nullptr) {
      throw std::runtime_error("mkdtemp failed");
    }
    path = buf.data();
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return path + "/" + name; }
};

// Runs the built binary with stdout+stderr captured; returns the exit code.
inline int run_cli(const std::string& args, const TempDir& dir,
                   std::string* output = nullptr) {
  const std::string capture = dir.file("_cli_output.txt");
  const std::string cmd =
      std::string(SOMDSA_CLI_PATH) + " " + args + " > " + capture + " 2>&1";
  const int rc = std::system(cmd.c_str());
  if (output) *output = read_file(capture);
  if (WIFEXITED(rc)) return WEXITSTATUS(rc);
  return -1;
}

}  // namespace testutil
