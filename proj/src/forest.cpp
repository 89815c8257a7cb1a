#include "wsids/forest.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "wsids/error.hpp"

namespace wsids {

namespace fs = std::filesystem;

void check_unique_ids(const Forest& forest) {
  std::unordered_set<std::string> seen;
  for (const auto& doc : forest) {
    if (!seen.insert(doc.id).second) {
      throw Error(ErrorKind::InvalidArgument, "duplicate document id '" + doc.id + "'");
    }
  }
}

std::vector<fs::path> list_xml_files(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw Error(ErrorKind::IoFailure, "not a directory: " + dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".xml") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return std::move(buffer).str();
}

void write_file(const fs::path& path, std::string_view content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorKind::IoFailure, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::IoFailure, "cannot rename onto " + path.string() + ": " + ec.message());
}

Forest load_forest(const fs::path& dir, const ParseOptions& parse, SoapMode mode) {
  Forest forest;
  for (const auto& file : list_xml_files(dir)) {
    try {
      forest.push_back(Document{file.filename().string(), preprocess(parse_document(read_file(file), parse), mode)});
    } catch (const Error& e) {
      throw Error(ErrorKind::PipelineFailure, "load " + file.string() + ": " + e.what());
    }
  }
  return forest;
}

namespace {

// Reverse-search enumeration: every connected node set whose top is the first
// chosen node is produced exactly once. `frontier` holds the candidates that
// may still be added, in a fixed order.
bool extend(const LabeledTree& tree, std::size_t max_size, std::vector<NodeId>& chosen,
            std::span<const NodeId> frontier,
            const std::function<bool(std::span<const NodeId>, NodeId)>& visit) {
  if (!visit(chosen, chosen.front())) return false;
  if (max_size && chosen.size() >= max_size) return true;
  for (std::size_t i = 0; i < frontier.size(); ++i) {
    const NodeId next = frontier[i];
    std::vector<NodeId> rest(frontier.begin() + static_cast<std::ptrdiff_t>(i) + 1, frontier.end());
    const auto kids = tree.children(next);
    rest.insert(rest.end(), kids.begin(), kids.end());
    chosen.push_back(next);
    const bool go_on = extend(tree, max_size, chosen, rest, visit);
    chosen.pop_back();
    if (!go_on) return false;
  }
  return true;
}

}  // namespace

bool for_each_connected_subtree(const LabeledTree& tree, std::size_t max_size,
                                const std::function<bool(std::span<const NodeId>, NodeId)>& visit) {
  std::vector<NodeId> chosen;
  for (NodeId top = 0; top < tree.size(); ++top) {
    chosen.assign(1, top);
    const auto kids = tree.children(top);
    if (!extend(tree, max_size, chosen, kids, visit)) return false;
  }
  return true;
}

}  // namespace wsids
