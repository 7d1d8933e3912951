#pragma once

namespace adaptmix {

// Version stamp written into model files and printed by the CLI.
inline constexpr const char* kVersion = "0.1.0";

// Format tag for serialized tokenizer models. Bump on breaking layout changes.
inline constexpr int kModelFormatVersion = 1;

}  // namespace adaptmix
