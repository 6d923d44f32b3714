#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "clarify/config.hpp"

namespace clarify {

/// Maps text to a fixed-length vector. Implementations must be safe to call concurrently.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual int dim() const = 0;
  virtual Eigen::VectorXd embed(std::string_view text) const = 0;
  /// One row per input text.
  virtual Eigen::MatrixXd embed_batch(const std::vector<std::string>& texts) const;
};

std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// Signed feature hashing over [a-z0-9]+ tokens, L2-normalized.
///
/// bucket = fnv1a64(token) mod dim, sign = +1 when bit 63 of the hash is clear.
/// Empty input (or no tokens) yields the zero vector.
class LexicalEmbedder final : public Embedder {
 public:
  explicit LexicalEmbedder(int dim = 256);
  int dim() const override { return dim_; }
  Eigen::VectorXd embed(std::string_view text) const override;

 private:
  int dim_;
};

/// Client for an embedding service: POST {endpoint}/embed {"texts": [...]} -> {"vectors": [[...]]}.
class HttpEmbedder final : public Embedder {
 public:
  HttpEmbedder(std::string endpoint, int dim, int timeout_ms, int batch_size);
  int dim() const override { return dim_; }
  Eigen::VectorXd embed(std::string_view text) const override;
  Eigen::MatrixXd embed_batch(const std::vector<std::string>& texts) const override;

 private:
  std::string endpoint_;
  int dim_;
  int timeout_ms_;
  int batch_size_;
};

std::shared_ptr<const Embedder> make_embedder(const RetrieverConfig& config, int timeout_ms);

}  // namespace clarify
