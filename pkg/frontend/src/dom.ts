/** Tiny virtual-node layer: views build VNodes, the browser shell mounts them.
 *
 * Keeping views as pure functions over data means every screen is testable
 * in plain node, without a DOM emulator.
 */

export type Child = VNode | string;

export interface VNode {
  tag: string;
  attrs: Record<string, string>;
  on: Record<string, (ev: Event) => void>;
  children: Child[];
}

export function h(
  tag: string,
  attrs: Record<string, string> = {},
  children: Child[] = [],
  on: Record<string, (ev: Event) => void> = {},
): VNode {
  return { tag, attrs, on, children };
}

export function toDom(node: Child): Node {
  if (typeof node === "string") {
    return document.createTextNode(node);
  }
  const el = document.createElement(node.tag);
  for (const [key, value] of Object.entries(node.attrs)) {
    el.setAttribute(key, value);
  }
  for (const [event, handler] of Object.entries(node.on)) {
    el.addEventListener(event, handler);
  }
  for (const child of node.children) {
    el.appendChild(toDom(child));
  }
  return el;
}

/** Depth-first search helpers used by views and tests alike. */
export function findAll(root: Child, pred: (v: VNode) => boolean): VNode[] {
  const out: VNode[] = [];
  const walk = (node: Child) => {
    if (typeof node === "string") return;
    if (pred(node)) out.push(node);
    node.children.forEach(walk);
  };
  walk(root);
  return out;
}

export function textOf(node: Child): string {
  if (typeof node === "string") return node;
  return node.children.map(textOf).join("");
}
