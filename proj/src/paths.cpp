#include "cinescript/paths.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cinescript/errors.hpp"

#ifndef CINESCRIPT_DEFAULT_DATA_DIR
#define CINESCRIPT_DEFAULT_DATA_DIR "data"
#endif

namespace cine {

std::string default_data_dir() {
  if (const char* env = std::getenv("CINE_DATA_DIR"); env && *env)
    return env;
  return CINESCRIPT_DEFAULT_DATA_DIR;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoError, "read failed for " + path);
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path);
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

}  // namespace cine
