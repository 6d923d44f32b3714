#include "clarify/embedding.hpp"

#include <fmt/format.h>

#include "clarify/error.hpp"
#include "clarify/http_json.hpp"
#include "clarify/text.hpp"

namespace clarify {

Eigen::MatrixXd Embedder::embed_batch(const std::vector<std::string>& texts) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(texts.size()), dim());
  for (std::size_t i = 0; i < texts.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = embed(texts[i]).transpose();
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

LexicalEmbedder::LexicalEmbedder(int dim) : dim_(dim) {
  if (dim <= 0) throw ValidationError("embedding dimension must be positive");
}

Eigen::VectorXd LexicalEmbedder::embed(std::string_view input) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim_);
  for (const auto& token : text::tokenize(input)) {
    const auto h = fnv1a64(token);
    const auto bucket = static_cast<Eigen::Index>(h % static_cast<std::uint64_t>(dim_));
    v(bucket) += (h >> 63) == 0 ? 1.0 : -1.0;
  }
  const double norm = v.norm();
  if (norm > 0) v /= norm;
  return v;
}

HttpEmbedder::HttpEmbedder(std::string endpoint, int dim, int timeout_ms, int batch_size)
    : endpoint_(std::move(endpoint)), dim_(dim), timeout_ms_(timeout_ms), batch_size_(batch_size) {}

Eigen::VectorXd HttpEmbedder::embed(std::string_view input) const {
  return embed_batch({std::string(input)}).row(0).transpose();
}

Eigen::MatrixXd HttpEmbedder::embed_batch(const std::vector<std::string>& texts) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(texts.size()), dim_);
  HttpRequestOptions options;
  options.timeout = std::chrono::milliseconds(timeout_ms_);
  for (std::size_t start = 0; start < texts.size(); start += static_cast<std::size_t>(batch_size_)) {
    const auto stop = std::min(texts.size(), start + static_cast<std::size_t>(batch_size_));
    nlohmann::json body{{"texts", std::vector<std::string>(texts.begin() + static_cast<long>(start),
                                                          texts.begin() + static_cast<long>(stop))}};
    const auto reply = post_json(endpoint_, "/embed", body, options);
    const auto& vectors = reply.at("vectors");
    if (!vectors.is_array() || vectors.size() != stop - start)
      throw TransportError(fmt::format("embedding service returned {} vectors for {} texts", vectors.size(), stop - start));
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      const auto values = vectors[i].get<std::vector<double>>();
      if (static_cast<int>(values.size()) != dim_)
        throw TransportError(fmt::format("embedding of dim {} where {} was configured", values.size(), dim_));
      for (int d = 0; d < dim_; ++d) {
        if (!std::isfinite(values[static_cast<std::size_t>(d)])) throw TransportError("non-finite embedding value");
        out(static_cast<Eigen::Index>(start + i), d) = values[static_cast<std::size_t>(d)];
      }
    }
  }
  return out;
}

std::shared_ptr<const Embedder> make_embedder(const RetrieverConfig& config, int timeout_ms) {
  if (config.backend == "http")
    return std::make_shared<HttpEmbedder>(config.endpoint, config.dim, timeout_ms, config.batch_size);
  return std::make_shared<LexicalEmbedder>(config.dim);
}

}  // namespace clarify
