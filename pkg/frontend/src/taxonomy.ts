import type { HarmTypeDoc, SpecificHarmDoc, TaxonomyDoc } from "./types";

export function harmType(taxonomy: TaxonomyDoc, id: string): HarmTypeDoc | undefined {
  return taxonomy.harm_types.find((ht) => ht.id === id);
}

/** The dependent picker only ever offers children of the chosen harm type. */
export function childrenOf(taxonomy: TaxonomyDoc, harmTypeId: string): SpecificHarmDoc[] {
  return harmType(taxonomy, harmTypeId)?.specific_harms ?? [];
}

export function definitionFor(
  taxonomy: TaxonomyDoc,
  harmTypeId: string,
  specificHarmId?: string,
): { name: string; definition: string } | undefined {
  const ht = harmType(taxonomy, harmTypeId);
  if (!ht) return undefined;
  if (!specificHarmId) return { name: ht.name, definition: ht.definition };
  const sh = ht.specific_harms.find((s) => s.id === specificHarmId);
  return sh ? { name: sh.name, definition: sh.definition } : undefined;
}
