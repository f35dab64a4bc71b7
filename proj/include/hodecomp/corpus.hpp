#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace hodecomp {

struct CorpusEntry {
  std::string name;
  std::string title;
  std::string text; // source file contents
  bool terminating = false;
};

// Embedded examples, sorted by name.
const std::vector<CorpusEntry>& corpus();
const CorpusEntry* find_corpus_entry(std::string_view name);

} // namespace hodecomp
