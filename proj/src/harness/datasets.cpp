#include "wot/harness/datasets.hpp"

#include "wot/ascii/ascii_task.hpp"
#include "wot/nav/serialize.hpp"

#include <set>

namespace wot::harness {

std::vector<TaskInstance> load_instances(TaskKind kind, const std::filesystem::path& path) {
    std::vector<TaskInstance> out;
    try {
        if (kind == TaskKind::navigation) {
            for (const auto& record : nav::read_nav_jsonl(path)) {
                if (auto ok = nav::verify(record); ok && !*ok) {
                    throw DatasetError(path.string() + ": instance " + record.id +
                                       " does not reproduce its target under simulation");
                }
                out.push_back(nav::to_task_instance(record));
            }
        } else {
            for (const auto& instance : ascii::read_jsonl(path)) {
                if (ascii::task_kind(instance.kind) != kind) {
                    throw DatasetError(path.string() + ": instance " + instance.id + " has kind " +
                                       std::string(ascii::to_string(instance.kind)) + ", expected " +
                                       std::string(to_string(kind)));
                }
                out.push_back(ascii::to_task_instance(instance));
            }
        }
    } catch (const DatasetError&) {
        throw;
    } catch (const std::exception& e) {
        throw DatasetError(e.what());
    }
    std::set<std::string> seen;
    for (const auto& instance : out) {
        if (!seen.insert(instance.id).second) throw DatasetError(path.string() + ": duplicate id " + instance.id);
    }
    return out;
}

bool score(const TaskInstance& instance, std::string_view prediction) {
    if (instance.kind == TaskKind::ascii_mnist) {
        if (instance.target.size() != 1 || instance.target[0] < '0' || instance.target[0] > '9') return false;
        return ascii::score_mnist(prediction, instance.target[0] - '0');
    }
    return ascii::score_exact_lower(prediction, instance.target);
}

}  // namespace wot::harness
