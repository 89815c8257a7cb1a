#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "wsids/soap.hpp"
#include "wsids/tree.hpp"
#include "wsids/xml.hpp"

namespace wsids {

struct Document {
  std::string id;
  LabeledTree tree;
};

// Training transactions. Document ids are unique.
using Forest = std::vector<Document>;

// Throws InvalidArgument on duplicate ids.
void check_unique_ids(const Forest& forest);

// Parses and preprocesses every *.xml file in `dir` (sorted by file name).
// Document ids are file names. Throws PipelineFailure naming the offending
// file on any parse error.
Forest load_forest(const std::filesystem::path& dir, const ParseOptions& parse = {},
                   SoapMode mode = SoapMode::Strict);

std::vector<std::filesystem::path> list_xml_files(const std::filesystem::path& dir);

std::string read_file(const std::filesystem::path& path);
// Writes via a temporary file and rename. Throws IoFailure.
void write_file(const std::filesystem::path& path, std::string_view content);

// Calls visit(nodes, top) once for every connected induced subtree of `tree`
// with at most `max_size` nodes (0 = unbounded); `top` is the subtree's root.
// Stops early when visit returns false. Returns false iff stopped early.
bool for_each_connected_subtree(
    const LabeledTree& tree, std::size_t max_size,
    const std::function<bool(std::span<const NodeId> nodes, NodeId top)>& visit);

}  // namespace wsids
