#pragma once

#include "wot/common/image.hpp"
#include "wot/llm/chat.hpp"
#include "wot/sandbox/execution.hpp"

#include <nlohmann/json.hpp>

#include <utility>

namespace wot::sandbox {

struct PostProcessConfig {
    int border_px = 32;
    Rgb border_color = Rgb::white();
    int max_dimension_px = 768;
};

void validate(const PostProcessConfig& config);
PostProcessConfig postprocess_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PostProcessConfig& config);

/// Pads every side by `border_px` pixels of `color`; channel count is kept.
Image add_border(const Image& image, int border_px, Rgb color);

/// Output size for resize_max: identity when the longer side fits,
/// otherwise the longer side becomes `max_dimension` and the shorter one
/// is scaled with half-up rounding (never below 1).
std::pair<int, int> fitted_size(int width, int height, int max_dimension);

/// Bilinear downscale to fitted_size (pixel-center sampling).
Image resize_max(const Image& image, int max_dimension);

class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Border then resize, re-encoded as PNG.
llm::ImagePart prepare_image(const Image& image, const PostProcessConfig& config);

/// prepare_image applied to the first artifact of a successful execution.
/// Throws PreconditionError when status is not ok, DecodeError when the
/// artifact cannot be decoded.
llm::ImagePart prepare_for_query(const ExecutionResult& result, const PostProcessConfig& config);

}  // namespace wot::sandbox
