#pragma once

#include "wot/common/task.hpp"
#include "wot/strategy/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wot::ascii {

enum class AsciiKind { mnist, word, kanji };

std::string_view to_string(AsciiKind kind);
AsciiKind parse_ascii_kind(std::string_view text);
TaskKind task_kind(AsciiKind kind);

/// The five rendering styles of the word-recognition task.
enum class FontCategory { three_d, basic, bubble, doh, dot_matrix, unknown };

std::string_view to_string(FontCategory category);
/// Lenient: accepts "3d"/"threeD", "dot matrix"/"dot_matrix", any case.
FontCategory parse_font_category(std::string_view text);

struct AsciiInstance {
    std::string id;
    AsciiKind kind = AsciiKind::word;
    std::string art;
    std::string target;
    FontCategory font_category = FontCategory::unknown;
};

class MalformedDataset : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnsupportedSubtask : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reads an upstream BIG-Bench task file (top-level "examples", or
/// "subtasks" each holding "examples").
///
/// Multiple-choice items become free-form: the target is the option with
/// the highest target_scores entry. For kanji only the pronunciation
/// subtask is kept. Output is ordered by upstream position and ids are
/// "<kind>-<position>".
std::vector<AsciiInstance> import_bigbench(const std::filesystem::path& path, AsciiKind kind);
std::vector<AsciiInstance> import_bigbench(const nlohmann::json& task, AsciiKind kind);

/// Seeded choice of `n` instances, returned in their original order.
/// Returns everything when n >= size.
std::vector<AsciiInstance> subsample(const std::vector<AsciiInstance>& instances, std::size_t n, std::uint64_t seed);

nlohmann::json to_json(const AsciiInstance& instance);
AsciiInstance ascii_instance_from_json(const nlohmann::json& j);
std::vector<AsciiInstance> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path, const std::vector<AsciiInstance>& instances);

/// Generic pipeline view; font category goes to metadata["font_category"].
TaskInstance to_task_instance(const AsciiInstance& instance);

/// Trim, then base-10 integer parse of the whole string; anything that
/// does not parse scores as incorrect.
bool score_mnist(std::string_view prediction, int target_digit);

/// lowercase(trim(prediction)) == lowercase(target).
bool score_exact_lower(std::string_view prediction, std::string_view target);

/// Sentences appended to the art in the code-writing turn.
const std::vector<std::string>& ascii_prompt_suffixes();

/// Matplotlib profile for the three ASCII tasks.
strategy::TaskProfile matplotlib_profile();

}  // namespace wot::ascii
