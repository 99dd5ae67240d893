#pragma once

#include <string_view>

// Contents of the files under core/data, compiled in at configure time.
namespace apisum::embedded {

std::string_view denylist();
std::string_view qualifier_map();
std::string_view stopwords();
std::string_view lemma_exceptions();

}  // namespace apisum::embedded
