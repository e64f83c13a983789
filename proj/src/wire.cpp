#include "fcarena/wire.hpp"

#include <cstdlib>

#include "httplib.h"

namespace fcarena::wire {

using callspec::json;

namespace {

httplib::Headers build_headers(const EndpointConfig& endpoint) {
    httplib::Headers headers;
    if (!endpoint.token_env.empty()) {
        const char* token = std::getenv(endpoint.token_env.c_str());
        if (token == nullptr || *token == '\0')
            throw TransportError("auth environment variable '" +
                                     endpoint.token_env + "' is not set",
                                 0);
        headers.emplace("Authorization", std::string("Bearer ") + token);
    }
    return headers;
}

json post_json(const EndpointConfig& endpoint, const std::string& path,
               const json& body) {
    httplib::Client client(endpoint.base_url);
    client.set_connection_timeout(0, endpoint.timeout_ms * 1000);
    client.set_read_timeout(0, endpoint.timeout_ms * 1000);
    httplib::Headers headers = build_headers(endpoint);
    std::string payload = body.dump();

    int attempts = 0;
    std::string last_error;
    for (int attempt = 0; attempt <= endpoint.max_retries; ++attempt) {
        ++attempts;
        auto res = client.Post(path, headers, payload, "application/json");
        if (!res) {
            last_error = httplib::to_string(res.error());
            continue;
        }
        if (res->status < 200 || res->status >= 300) {
            last_error = "HTTP status " + std::to_string(res->status);
            continue;
        }
        try {
            return json::parse(res->body);
        } catch (const json::parse_error& e) {
            throw PayloadError(std::string("response is not valid JSON: ") +
                               e.what());
        }
    }
    throw TransportError("POST " + endpoint.base_url + path + " failed after " +
                             std::to_string(attempts) + " attempt(s): " +
                             last_error,
                         attempts);
}

}  // namespace

ChatResult chat_complete(const EndpointConfig& endpoint,
                         const std::vector<Message>& messages,
                         const std::optional<json>& tools) {
    json body{{"model", endpoint.model}, {"messages", json::array()}};
    for (const auto& message : messages)
        body["messages"].push_back(
            {{"role", message.role}, {"content", message.content}});
    if (tools.has_value()) {
        body["tools"] = *tools;
        body["tool_choice"] = "auto";
    }
    for (const auto& [key, value] : endpoint.sampling.items())
        body[key] = value;

    json reply = post_json(endpoint, endpoint.chat_path, body);
    auto choices = reply.find("choices");
    if (choices == reply.end() || !choices->is_array() || choices->empty())
        throw PayloadError("response has no choices");
    const json& message = choices->at(0).value("message", json::object());
    if (!message.is_object()) throw PayloadError("first choice has no message");

    ChatResult result;
    if (auto it = message.find("content"); it != message.end() && it->is_string())
        result.content = it->get<std::string>();
    if (auto it = message.find("tool_calls");
        it != message.end() && it->is_array()) {
        for (const json& call : *it) {
            const json& function = call.value("function", json::object());
            auto name = function.find("name");
            auto arguments = function.find("arguments");
            if (name == function.end() || !name->is_string() ||
                arguments == function.end() || !arguments->is_string())
                throw PayloadError("malformed tool_calls entry");
            result.tool_calls.push_back(
                {name->get<std::string>(), arguments->get<std::string>()});
        }
    }
    if (result.content.empty() && result.tool_calls.empty())
        throw PayloadError("response carries neither content nor tool calls");
    return result;
}

callspec::CanonicalAnswer answer_from_chat(const ChatResult& reply,
                                           const std::string& context_id) {
    if (reply.tool_calls.empty())
        return callspec::CanonicalAnswer::make_refusal();
    std::vector<callspec::CanonicalCall> calls;
    for (const auto& tool_call : reply.tool_calls) {
        callspec::CanonicalCall call;
        call.tool_name = tool_call.name;
        try {
            call.arguments = callspec::canonicalize_value(
                tool_call.arguments.empty() ? json::object()
                                            : json::parse(tool_call.arguments));
        } catch (const json::parse_error& e) {
            throw PayloadError("tool call for " + context_id +
                               " has unparsable arguments: " + e.what());
        }
        calls.push_back(std::move(call));
    }
    return callspec::CanonicalAnswer::make_calls(std::move(calls));
}

std::vector<std::vector<double>> embed_remote(
    const EndpointConfig& endpoint, const std::vector<std::string>& inputs) {
    json body{{"model", endpoint.model}, {"input", inputs}};
    json reply = post_json(endpoint, endpoint.embed_path, body);
    auto data = reply.find("data");
    if (data == reply.end() || !data->is_array())
        throw PayloadError("embeddings response has no data array");
    if (data->size() != inputs.size())
        throw PayloadError("embeddings response size " +
                           std::to_string(data->size()) + " != input size " +
                           std::to_string(inputs.size()));
    std::vector<std::vector<double>> result;
    result.reserve(data->size());
    for (const json& row : *data) {
        auto embedding = row.find("embedding");
        if (embedding == row.end() || !embedding->is_array())
            throw PayloadError("embeddings entry has no embedding array");
        result.push_back(embedding->get<std::vector<double>>());
    }
    return result;
}

}  // namespace fcarena::wire
