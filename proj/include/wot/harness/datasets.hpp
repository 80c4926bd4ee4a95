#pragma once

#include "wot/common/task.hpp"

#include <filesystem>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace wot::harness {

class DatasetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reads the internal JSONL format for `kind`. Navigation records that carry
/// a program and world are re-simulated and must reproduce their target.
/// Instance ids must be unique.
std::vector<TaskInstance> load_instances(TaskKind kind, const std::filesystem::path& path);

/// MNIST: integer parse against the digit; everything else: trimmed,
/// case-insensitive exact match.
bool score(const TaskInstance& instance, std::string_view prediction);

}  // namespace wot::harness
