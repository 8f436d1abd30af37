#pragma once

#include <string>

namespace cine {

// Directory holding bundled data files (lexicon, prompt templates).
// Resolution order: CINE_DATA_DIR environment variable, then the path baked
// in at build time.
std::string default_data_dir();

// Reads a whole file; throws IoError when unreadable.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace cine
