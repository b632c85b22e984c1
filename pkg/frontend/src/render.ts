/** Block rendering: the block text is shown exactly as the server sent
 * it (monospace, whitespace preserved); only the docURL becomes a link. */

import type { Block } from "./api.js";

export function renderBlock(doc: Document, block: Block): HTMLElement {
  const el = doc.createElement("div");
  el.className = `block block-${block.kind}`;
  const pre = doc.createElement("pre");
  pre.className = "block-text";
  pre.textContent = block.text;
  el.appendChild(pre);
  if (block.docURL) {
    const link = doc.createElement("a");
    link.className = "block-link";
    link.href = block.docURL;
    link.target = "_blank";
    link.rel = "noopener";
    link.textContent = block.docURL;
    el.appendChild(link);
  }
  return el;
}

export function renderEcho(doc: Document, line: string): HTMLElement {
  const el = doc.createElement("div");
  el.className = "echo";
  const pre = doc.createElement("pre");
  pre.className = "echo-text";
  pre.textContent = `Disco> ${line}`;
  el.appendChild(pre);
  return el;
}

export function renderNotice(doc: Document, text: string, kind: string): HTMLElement {
  const el = doc.createElement("div");
  el.className = `notice notice-${kind}`;
  el.textContent = text;
  return el;
}
