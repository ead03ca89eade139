/**
 * Renders a learned pattern's signature as an indented label tree with
 * its constraint keywords inline, one line per signature node.
 */

import type { PatternDoc } from "./types.js";

function pathKey(path: number[]): string {
  return path.join(".");
}

export function signatureLines(pattern: PatternDoc): string[] {
  const keywords = new Map<string, string[]>();
  for (const constraint of pattern.signature.constraints) {
    const key = pathKey(constraint.path);
    const list = keywords.get(key) ?? [];
    list.push(constraint.keyword);
    keywords.set(key, list);
  }
  const nodes = [...pattern.signature.nodes].sort((a, b) => {
    const depth = Math.min(a.path.length, b.path.length);
    for (let i = 0; i < depth; i++) {
      if (a.path[i]! !== b.path[i]!) {
        return a.path[i]! - b.path[i]!;
      }
    }
    return a.path.length - b.path.length;
  });
  return nodes.map((node) => {
    const indent = "  ".repeat(node.path.length);
    const position =
      node.path.length === 0 ? "" : `[${node.path[node.path.length - 1]}] `;
    const inline = keywords.get(pathKey(node.path));
    const suffix = inline
      ? `  {${inline
          .sort()
          .map((k) => JSON.stringify(k))
          .join(", ")}}`
      : "";
    return `${indent}${position}${node.label}${suffix}`;
  });
}

export function patternHeading(pattern: PatternDoc): string {
  const count = pattern.accepted.length;
  const noun = count === 1 ? "sentence" : "sentences";
  return `pattern ${pattern.id} — ${count} accepted ${noun}`;
}
