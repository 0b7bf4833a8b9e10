/*
 * Copyright 2026 The Voidscope Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

// A forgiving HTML tree builder, enough for result pages: elements, text,
// attributes, void elements, raw-text script/style, and recovery from
// mismatched end tags. No scripting, no CSS.
namespace voidscope::html {

struct Node {
  enum class Kind { kElement, kText };

  Kind kind = Kind::kElement;
  std::string tag;  // lower-case; empty for text and the document root
  std::vector<std::pair<std::string, std::string>> attrs;
  std::string text;  // entity-decoded, for text nodes
  std::vector<std::unique_ptr<Node>> children;
  Node* parent = nullptr;

  bool is_element() const { return kind == Kind::kElement; }
  const std::string* Attr(std::string_view name) const;
  std::string_view Id() const;
  bool HasClass(std::string_view cls) const;
  // Descendant text with whitespace collapsed. Skips script and style.
  std::string InnerText() const;
};

struct Document {
  std::unique_ptr<Node> root;
  std::size_t element_count = 0;
};

Document Parse(std::string_view html);

std::string DecodeEntities(std::string_view s);

// Depth-first, document order.
void Walk(const Node& node, const std::function<void(const Node&)>& visit);
const Node* FindById(const Node& root, std::string_view id);
std::vector<const Node*> FindAll(const Node& root,
                                 const std::function<bool(const Node&)>& pred);
// Like FindAll but does not descend into matches.
std::vector<const Node*> FindOutermost(const Node& root,
                                       const std::function<bool(const Node&)>& pred);
const Node* FindFirst(const Node& root, const std::function<bool(const Node&)>& pred);
bool HasAncestor(const Node& node, const std::function<bool(const Node&)>& pred,
                 const Node* stop = nullptr);

}  // namespace voidscope::html
