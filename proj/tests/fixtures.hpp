#pragma once

#include <string>
#include <vector>

#include "fcarena/corpus.hpp"

// Canonical in-memory seed records shared across the test binaries.
namespace fixtures {

inline fcarena::corpus::ParamSpec param(std::string name, std::string type,
                                        bool required) {
    fcarena::corpus::ParamSpec p;
    p.name = std::move(name);
    p.type = std::move(type);
    p.required = required;
    return p;
}

// "Set a timer for 30 minutes for the pasta." -> set_timer(duration_minutes=30,
// label="pasta"). No required string argument, so unit rewrites stay valid.
inline fcarena::corpus::SeedRecord timer_seed() {
    fcarena::corpus::SeedRecord seed;
    seed.id = "timer-1";
    seed.query = "Set a timer for 30 minutes for the pasta.";
    fcarena::corpus::ToolSchema tool;
    tool.name = "set_timer";
    tool.description = "Start a countdown timer.";
    tool.parameters = {param("duration_minutes", "integer", true),
                       param("label", "string", false)};
    seed.tools = {tool};
    fcarena::callspec::CanonicalCall call;
    call.tool_name = "set_timer";
    call.arguments = fcarena::callspec::json{{"duration_minutes", 30},
                                             {"label", "pasta"}};
    seed.answer = fcarena::callspec::CanonicalAnswer::make_calls({call});
    seed.complexity = fcarena::corpus::Complexity::single;
    seed.language = fcarena::corpus::Language::en;
    return seed;
}

// "What is the weather in Paris for 7 days?" -> get_forecast(city="Paris",
// days=7). The required string argument "Paris" must stay mentioned.
inline fcarena::corpus::SeedRecord weather_seed() {
    fcarena::corpus::SeedRecord seed;
    seed.id = "weather-1";
    seed.query = "What is the weather in Paris for 7 days?";
    fcarena::corpus::ToolSchema tool;
    tool.name = "get_forecast";
    tool.description = "Fetch a weather forecast.";
    tool.parameters = {param("city", "string", true),
                       param("days", "integer", true)};
    seed.tools = {tool};
    fcarena::callspec::CanonicalCall call;
    call.tool_name = "get_forecast";
    call.arguments = fcarena::callspec::json{{"city", "Paris"}, {"days", 7}};
    seed.answer = fcarena::callspec::CanonicalAnswer::make_calls({call});
    seed.complexity = fcarena::corpus::Complexity::single;
    seed.language = fcarena::corpus::Language::en;
    return seed;
}

inline fcarena::corpus::SeedRecord parallel_seed() {
    fcarena::corpus::SeedRecord seed;
    seed.id = "parallel-1";
    seed.query = "Check the weather in London and Tokyo.";
    fcarena::corpus::ToolSchema tool;
    tool.name = "get_forecast";
    tool.parameters = {param("city", "string", true),
                       param("days", "integer", true)};
    seed.tools = {tool};
    fcarena::callspec::CanonicalCall london;
    london.tool_name = "get_forecast";
    london.arguments = fcarena::callspec::json{{"city", "London"}, {"days", 1}};
    fcarena::callspec::CanonicalCall tokyo;
    tokyo.tool_name = "get_forecast";
    tokyo.arguments = fcarena::callspec::json{{"city", "Tokyo"}, {"days", 1}};
    seed.answer =
        fcarena::callspec::CanonicalAnswer::make_calls({london, tokyo});
    seed.complexity = fcarena::corpus::Complexity::parallel;
    seed.language = fcarena::corpus::Language::en;
    return seed;
}

inline fcarena::corpus::SeedRecord refusal_seed() {
    fcarena::corpus::SeedRecord seed;
    seed.id = "irrelevant-1";
    seed.query = "What is the capital of France?";
    fcarena::corpus::ToolSchema tool;
    tool.name = "set_timer";
    tool.parameters = {param("duration_minutes", "integer", true)};
    seed.tools = {tool};
    seed.answer = fcarena::callspec::CanonicalAnswer::make_refusal();
    seed.complexity = fcarena::corpus::Complexity::irrelevant;
    seed.language = fcarena::corpus::Language::en;
    return seed;
}

inline fcarena::corpus::QueryPrompt prompt_of(
    const fcarena::corpus::SeedRecord& seed) {
    return fcarena::corpus::build_query_prompt(seed);
}

}  // namespace fixtures
