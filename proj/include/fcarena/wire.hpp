#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fcarena/callspec.hpp"

// OpenAI-compatible wire adapters: chat completions (with optional tools
// block) and embeddings. Auth tokens are read from the environment variable
// named in the config; token values never appear in configs or errors.
namespace fcarena::wire {

struct EndpointConfig {
    std::string base_url;  // scheme://host[:port]
    std::string model;
    std::string token_env;  // name of the env var holding the bearer token
    std::string chat_path = "/v1/chat/completions";
    std::string embed_path = "/v1/embeddings";
    int timeout_ms = 30000;
    int max_retries = 2;
    callspec::json sampling = callspec::json::object();  // forwarded verbatim
};

class TransportError : public std::runtime_error {
  public:
    TransportError(const std::string& what, int attempts)
        : std::runtime_error(what), attempts_(attempts) {}
    int attempts() const { return attempts_; }

  private:
    int attempts_;
};

class PayloadError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Message {
    std::string role;
    std::string content;
};

struct ToolCall {
    std::string name;
    std::string arguments;  // JSON text, as transmitted
};

struct ChatResult {
    std::string content;
    std::vector<ToolCall> tool_calls;
};

// `tools` follows the chat-completions function-tool schema when present.
ChatResult chat_complete(const EndpointConfig& endpoint,
                         const std::vector<Message>& messages,
                         const std::optional<callspec::json>& tools = std::nullopt);

// Canonical answer from a chat reply: tool calls parse into Calls, a
// text-only reply into Refusal. context_id names the query in errors.
callspec::CanonicalAnswer answer_from_chat(const ChatResult& reply,
                                           const std::string& context_id);

std::vector<std::vector<double>> embed_remote(const EndpointConfig& endpoint,
                                              const std::vector<std::string>& inputs);

}  // namespace fcarena::wire
