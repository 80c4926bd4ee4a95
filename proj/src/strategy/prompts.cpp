#include "wot/strategy/prompts.hpp"

namespace wot::strategy::prompts {

namespace {

std::string answer_format(std::string_view marker) {
    return "Make sure to output an answer after \"" + std::string(marker) + "\" without any explanation.";
}

}  // namespace

std::string visualization_system(std::string_view tool) {
    return "You write code to create visualizations using the " + std::string(tool) +
           " library in Python, which the user will run and provide as images. "
           "Do NOT produce a final answer to the query until considering the visualization.";
}

std::string cot_answer_extraction(std::string_view marker) {
    return "Therefore, what is the final answer? " + answer_format(marker);
}

std::string image_answer_instruction(std::string_view marker) {
    return "The image above is the visualization produced by running your code. "
           "Use it to answer the query. " +
           answer_format(marker);
}

std::string rendered_input_instruction(std::string_view marker) {
    return "The image above shows the input of the query. Use it to answer the query. " + answer_format(marker);
}

}  // namespace wot::strategy::prompts
