#pragma once

#include <string>
#include <string_view>
#include <vector>

// Minimal tolerant HTML handling for Stack Overflow post bodies. Not a
// conforming parser: it only understands what post bodies actually contain.
namespace apisum::html {

// Decodes named (&amp; &lt; &gt; &quot; &apos; &nbsp; and a few typographic
// ones) and numeric (&#39; &#x27;) character references. Unknown references
// are left as written.
std::string decode_entities(std::string_view text);

struct CodeSpan {
  std::string text;   // entity-decoded content
  bool in_pre = false;  // inside a <pre> element
};

// Content of every <code> element in document order. Unclosed spans are closed
// at end of input.
std::vector<CodeSpan> code_spans(std::string_view html);

// Plain text of a post body. Inline <code> content is kept verbatim, <pre>
// content is dropped, and block-level element boundaries become newlines.
// Each output line is trimmed with runs of spaces collapsed; blank lines are
// removed.
std::string strip_html(std::string_view html);

}  // namespace apisum::html
